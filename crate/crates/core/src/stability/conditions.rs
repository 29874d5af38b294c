use super::overall_condition_name;
use crate::conditions::Condition;
use crate::equilibria::{Equilibrium, Family};
use crate::error::Result;
use crate::model::state::{I, M, N, T};
use crate::model::{coefficients, jacobian, reproduction_numbers, CoefficientTag, ModelParams, Ratio};
use crate::numerics::{char_poly, routh_hurwitz, Polynomial, Verdict};

fn ratio_below_one(name: &str, r: &Ratio) -> Condition {
    Condition::lt(name, r.value.unwrap_or(f64::NAN), 1.0)
}

fn all_of(name: &str, conds: &[Condition]) -> Condition {
    Condition::flag(name, conds.iter().all(|c| c.holds))
}

/// Routh–Hurwitz conditions on a monic polynomial, one per coefficient and minor.
fn hurwitz_conditions(prefix: &str, poly: &Polynomial) -> Result<Vec<Condition>> {
    let h = routh_hurwitz(poly)?;
    let mut out: Vec<Condition> = poly.coeffs()[1..]
        .iter()
        .enumerate()
        .map(|(k, &b)| Condition::gt(format!("{prefix}.b{}>0", k + 1), b, 0.0))
        .collect();
    out.extend(h.minors.iter().enumerate().map(|(k, &d)| Condition::gt(format!("{prefix}.minor{}>0", k + 1), d, 0.0)));
    out.push(Condition::flag(format!("{prefix}.hurwitz"), h.verdict == Verdict::Stable));
    Ok(out)
}

/// The stability conditions as stated for each family, evaluated verbatim.
pub fn theorem_conditions(eq: &Equilibrium, p: &ModelParams) -> Result<Vec<Condition>> {
    let x = eq.point;
    let overall = overall_condition_name(eq.family);
    let mut out = Vec::new();
    match eq.family {
        Family::TumorFree => {
            let r = reproduction_numbers(&x, p)?;
            out.push(ratio_below_one("R0<1", &r.r0));
            out.push(ratio_below_one("R1<1", &r.r1));
            out.push(all_of(overall, &out));
            let lower = p.s * x.m / p.v_m;
            let upper = (p.a2 * (1.0 + p.d) - 2.0 * p.b1 * x.n - p.l1 * x.e * p.unblocked() - p.m_d) / p.g1;
            out.push(Condition::lt("remark3.lower", lower, x.i));
            out.push(Condition::lt("remark3.upper", x.i, upper));
        }
        Family::Dead1 => {
            let r = reproduction_numbers(&x, p)?;
            let b = coefficients(&x, p, CoefficientTag::B)?;
            out.push(ratio_below_one("R_IM<1", &r.r_im.expect("defined at N = T = 0")));
            for k in [0, 2, 4, 8] {
                out.push(Condition::lt(format!("B{k}<0"), b[k], 0.0));
            }
            out.push(all_of(overall, &out));
        }
        Family::Dead2 => {
            let c = coefficients(&x, p, CoefficientTag::C)?;
            let g1 = c[6] * c[8] - c[5] * c[9] - c[3] * c[4] - c[2] * c[9] - c[2] * c[5];
            let g0 = c[2] * c[5] * c[9] - c[2] * c[6] * c[8] + c[3] * c[4] * c[9];
            out.push(Condition::lt("theorem5.i", p.a1, p.d1 * x.t / (1.0 + p.epsilon * x.t) - p.l1 * x.e));
            out.push(Condition::gt("theorem5.ii", g1, 0.0));
            out.push(Condition::gt("theorem5.iii", g0, 0.0));
            out.push(all_of(overall, &out));
        }
        Family::Coexisting => {
            let cp = char_poly(&jacobian(&x, p)?)?;
            let h = hurwitz_conditions("full", &cp)?;
            let holds = h.last().is_some_and(|c| c.holds);
            out.extend(h);
            out.push(Condition::flag(overall, holds));
        }
    }
    Ok(out)
}

/// Conditions rebuilt from the Jacobian's block structure; `derived` combines them.
pub fn derived_conditions(eq: &Equilibrium, p: &ModelParams) -> Result<Vec<Condition>> {
    let x = eq.point;
    let j = jacobian(&x, p)?;
    let mut out = Vec::new();
    let block = |out: &mut Vec<Condition>, name: &str, a: usize, b: usize| {
        out.push(Condition::lt(format!("{name}.trace<0"), j[a][a] + j[b][b], 0.0));
        out.push(Condition::gt(format!("{name}.det>0"), j[a][a] * j[b][b] - j[a][b] * j[b][a], 0.0));
    };
    match eq.family {
        Family::TumorFree => {
            block(&mut out, "nt", N, T);
            block(&mut out, "im", I, M);
        }
        Family::Dead1 => {
            out.push(Condition::lt("n.rate<0", j[N][N], 0.0));
            out.push(Condition::lt("t.rate<0", j[T][T], 0.0));
            block(&mut out, "im", I, M);
        }
        Family::Dead2 => {
            out.push(Condition::lt("n.rate<0", j[N][N], 0.0));
            let idx = [T, I, M];
            let sub: [[f64; 3]; 3] = std::array::from_fn(|r| std::array::from_fn(|c| j[idx[r]][idx[c]]));
            out.extend(hurwitz_conditions("tim", &char_poly(&sub)?)?);
        }
        Family::Coexisting => {
            // Divide out the estrogen factor (λ + θ).
            let c = char_poly(&j)?;
            let mut q = Vec::with_capacity(5);
            let mut acc = 0.0;
            for &ck in &c.coeffs()[..5] {
                acc = ck - p.theta * acc;
                q.push(acc);
            }
            out.extend(hurwitz_conditions("deflated", &Polynomial::new(q)?)?);
        }
    }
    let holds = out.iter().all(|c| c.holds);
    out.push(Condition::flag("derived", holds && p.theta > 0.0));
    Ok(out)
}
