//! Existence conditions attached to each equilibrium family.

use super::reduced::{dead1_quadratic_coeffs, discriminant, immune_loss, positive_root_count, coexist_quadratic_coeffs};
use super::Family;
use crate::conditions::{safe_ratio, Condition};
use crate::model::{ModelParams, SystemState};

fn all_of(name: &str, parts: &[&Condition]) -> Condition {
    Condition::flag(name, parts.iter().all(|c| c.holds))
}

/// Existence conditions for `family` evaluated at `x`. Pure in `(p, x)`.
pub fn existence_flags(family: Family, p: &ModelParams, x: &SystemState) -> Vec<Condition> {
    match family {
        Family::TumorFree => tumor_free_flags(p, x),
        Family::Dead1 => dead1_flags(p, x),
        Family::Dead2 => dead2_flags(p, x),
        Family::Coexisting => coexisting_flags(p, x),
    }
}

fn tumor_free_flags(p: &ModelParams, x: &SystemState) -> Vec<Condition> {
    let u = p.unblocked();
    let below_one = p.k < 1.0;
    let i = Condition::le("lemma1.i", x.e, safe_ratio(p.a1, p.l1 * u)).with_holds(below_one && x.e <= safe_ratio(p.a1, p.l1 * u));
    let ii = Condition::le("lemma1.ii", x.m, safe_ratio(p.m, p.p_m));
    // Without a pole in M(I) the bound is vacuous.
    let pole = if p.chi > p.n_m { p.n_m * p.xi / (p.chi - p.n_m) } else { f64::INFINITY };
    let iii = Condition::le("lemma1.iii", x.i, pole);
    let iv_a1 = Condition::le("lemma1.iv_a1", p.l1, safe_ratio(p.theta * p.a1, p.p * u * u));
    let iv_a2 = Condition::le("lemma1.iv_a2", p.l1, safe_ratio(p.theta * p.a2, p.p * u * u));
    let all = all_of("lemma1", &[&i, &ii, &iii, &iv_a1]);
    let source = Condition::le("tumor_source_vanishes", (p.l1 * x.n * x.e * u).abs(), 0.0);
    vec![i, ii, iii, iv_a1, iv_a2, all, source]
}

fn dead1_flags(p: &ModelParams, x: &SystemState) -> Vec<Condition> {
    let a = immune_loss(p, x.e);
    let i = Condition::lt("lemma2.i", safe_ratio(p.p_m * p.v_m * p.xi, p.s * p.chi * a * p.n_m), 1.0);
    let ii = Condition::lt("lemma2.ii", p.k, 1.0);
    let iii = Condition::ge("lemma2.iii", p.n_m, p.chi * x.i / (p.xi + x.i));
    let all = all_of("lemma2", &[&i, &ii, &iii]);
    let disc = Condition::ge("dead1.discriminant", discriminant(&dead1_quadratic_coeffs(p, x.e)), 0.0);
    vec![i, ii, iii, all, disc]
}

fn dead2_flags(p: &ModelParams, x: &SystemState) -> Vec<Condition> {
    let upper = (p.a2 * p.d - p.m_d) / p.b2;
    let lower = upper - safe_ratio(p.g1 * p.g1 * p.n_m, p.b2 * (p.chi - p.g1 * p.n_m));
    let i = Condition::lt("lemma3.i", p.k, 1.0);
    let lo = Condition::ge("lemma3.ii_lower", x.t, lower);
    let hi = Condition::le("lemma3.ii_upper", x.t, upper);
    let ii = all_of("lemma3.ii", &[&lo, &hi]);
    let all = all_of("lemma3", &[&i, &ii]);
    let expected_i = (p.a2 * p.d - p.b2 * x.t - p.m_d) / p.g1;
    let t_eq = Condition::le("dead2.immune_from_tumor_balance", (x.i - expected_i).abs(), 1e-10);
    vec![i, lo, hi, ii, all, t_eq]
}

fn coexisting_flags(p: &ModelParams, x: &SystemState) -> Vec<Condition> {
    let cap = (p.a2 * p.d - p.m_d) / p.g1;
    let in_range = Condition::lt("lemma4.i_upper", x.i, cap).with_holds(x.i > 0.0 && x.i < cap);
    let k = Condition::lt("lemma4.k", p.k, 1.0);
    let all = all_of("lemma4", &[&in_range, &k]);
    let [a, b, c] = coexist_quadratic_coeffs(p, x.n, x.i, x.e);
    let count = positive_root_count(a, b, c);
    let b_pos = Condition::gt("eq6.b_positive", b, 0.0);
    let c_pos = Condition::gt("eq6.c_positive", c, 0.0);
    let roots = Condition::ge("eq6.positive_roots", count as f64, 1.0);
    let mu = a * x.t * x.t + b * x.t + c;
    let scale = a * x.t * x.t + b.abs() * x.t + c.abs();
    let on_root = Condition::le("eq6.vanishes_at_T", safe_ratio(mu.abs(), scale), 1e-9);
    vec![in_range, k, all, b_pos, c_pos, roots, on_root]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_are_idempotent() {
        let p = ModelParams::default();
        let x = SystemState::new(0.0, 0.3, 0.2, p.estrogen_star(), 0.3);
        for f in [Family::TumorFree, Family::Dead1, Family::Dead2, Family::Coexisting] {
            let a = existence_flags(f, &p, &x);
            let b = existence_flags(f, &p, &x);
            assert_eq!(format!("{a:?}"), format!("{b:?}"));
        }
    }

    #[test]
    fn full_blockade_fails_the_lemmas() {
        let p = ModelParams { k: 1.0, ..Default::default() };
        let x = SystemState::new(1.0, 0.0, 0.5, 0.0, 0.2);
        let f = existence_flags(Family::TumorFree, &p, &x);
        assert!(!crate::conditions::find(&f, "lemma1").unwrap().holds);
        assert!(crate::conditions::find(&f, "tumor_source_vanishes").unwrap().holds);
        let f = existence_flags(Family::Dead1, &p, &x);
        assert!(!crate::conditions::find(&f, "lemma2").unwrap().holds);
    }
}
