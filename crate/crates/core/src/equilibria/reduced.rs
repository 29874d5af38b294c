//! Scalar reductions of the steady-state equations, derived and as printed.

use serde::{Deserialize, Serialize};

use crate::model::ModelParams;
use crate::numerics::Polynomial;

/// Leading coefficients below this fraction of the largest are dropped.
pub(crate) const TRIM_TOL: f64 = 1e-14;

/// `m + l3·E(1−k)/(g+E)`, the total immune loss rate at `T = 0`.
pub fn immune_loss(p: &ModelParams, e: f64) -> f64 {
    p.m + p.l3 * e * p.unblocked() / (p.g + e)
}

/// `n_M(ξ+I) − χI`, the drug-balance denominator; positive where `M(I)` is admissible.
pub fn drug_denominator(p: &ModelParams, i: f64) -> f64 {
    p.n_m * (p.xi + i) - p.chi * i
}

/// Steady drug level `v_M(ξ+I) / (n_M(ξ+I) − χI)`, `None` past the pole.
pub fn drug_level(p: &ModelParams, i: f64) -> Option<f64> {
    let den = drug_denominator(p, i);
    (den > 0.0).then(|| p.v_m * (p.xi + i) / den)
}

/// `(q0, q1)` with `j_M + M(I) = (q0 + q1·I) / D(I)`.
fn saturation_terms(p: &ModelParams) -> (f64, f64) {
    let q0 = p.xi * (p.j_m * p.n_m + p.v_m);
    let q1 = p.j_m * (p.n_m - p.chi) + p.v_m;
    (q0, q1)
}

/// I-equation at `T = 0` with `M = M(I)` substituted, cleared of denominators.
/// Descending coefficients `[c2, c1, c0]`.
pub fn dead1_quadratic_coeffs(p: &ModelParams, e: f64) -> [f64; 3] {
    let a = immune_loss(p, e);
    let (q0, q1) = saturation_terms(p);
    let pv = p.p_m * p.v_m;
    [pv - a * q1, p.s * q1 - a * q0 + pv * p.xi, p.s * q0]
}

/// The quadratic in `I` exactly as printed in the source (with the drug
/// half-saturation constant absent).
pub fn dead1_quadratic_printed_coeffs(p: &ModelParams, e: f64) -> [f64; 3] {
    let a = immune_loss(p, e);
    let pv = p.p_m * p.v_m;
    [a * p.chi + pv, -(a * p.n_m - pv * p.xi + p.s * p.chi), p.s * p.n_m]
}

/// Discriminant `c1² − 4·c2·c0`.
pub fn discriminant(c: &[f64; 3]) -> f64 {
    c[1] * c[1] - 4.0 * c[0] * c[2]
}

/// Ascending-order product.
fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// Exact reduction of the `N = 0` steady state to one equation in `T`.
///
/// With `I(T) = (a2d − m_d − b2T)/g1` and `M = M(I)`, the I-equation times
/// `(o+T)·(q0 + q1·I)` is a quartic. Descending coefficients.
pub fn dead2_quartic_coeffs(p: &ModelParams, e: f64) -> Vec<f64> {
    let growth = p.a2 * p.d - p.m_d;
    let extra = p.l3 * e * p.unblocked() / (p.g + e);
    let (q0, q1) = saturation_terms(p);
    let i_of_t = [growth / p.g1, -p.b2 / p.g1];
    let o_plus_t = [p.o, 1.0];
    let q = add(&[q0], &scale(&i_of_t, q1));
    // rT − (g2T + m + extra)(o+T)
    let bracket = add(&[0.0, p.r], &scale(&mul(&[p.m + extra, p.g2], &o_plus_t), -1.0));

    let source = scale(&mul(&o_plus_t, &q), p.s);
    let loss = mul(&mul(&i_of_t, &bracket), &q);
    let boost = scale(&mul(&mul(&i_of_t, &add(&[p.xi], &i_of_t)), &o_plus_t), p.p_m * p.v_m);
    let mut asc = add(&add(&source, &loss), &boost);
    asc.reverse();
    asc
}

/// `l3E(1−k)/(g+E) − p_M·M/(j_M+M)`.
pub fn dead2_c(p: &ModelParams, e: f64, m: f64) -> f64 {
    p.l3 * e * p.unblocked() / (p.g + e) - p.p_m * m / (p.j_m + m)
}

/// Cubic in `T` obtained when `C` is held fixed, derived by substitution. Descending.
pub fn dead2_cubic_derived_coeffs(p: &ModelParams, c: f64) -> [f64; 4] {
    let ad = p.a2 * p.d;
    let growth = ad - p.m_d;
    let (b2, g2, o, r, m) = (p.b2, p.g2, p.o, p.r, p.m);
    [
        b2 * g2,
        -growth * g2 - b2 * r + b2 * g2 * o + b2 * m + b2 * c,
        growth * (r - g2 * o - m - c) + b2 * (m + c) * o + p.g1 * p.s,
        -growth * (m + c) * o + p.g1 * p.s * o,
    ]
}

/// The same cubic with coefficients transcribed term by term from the source.
pub fn dead2_cubic_printed_coeffs(p: &ModelParams, c: f64) -> [f64; 4] {
    let ad = p.a2 * p.d;
    let (b2, g2, o, r, m, md) = (p.b2, p.g2, p.o, p.r, p.m, p.m_d);
    [
        b2 * g2,
        b2 * m + b2 * g2 * o - b2 * r + b2 * c - ad * g2 - ad * c + md * g2,
        b2 * m * o + b2 * c * o - ad * m - ad * g2 * o + r * ad - ad * o * c + p.g1 * p.s + md * m
            + md * g2 * p.theta
            - r * md
            + md * c,
        md * c * o + md * m * o + p.g1 * p.s * o - ad * m * o,
    ]
}

/// `μ(T) = b2·T² + b·T + c` with `b = g1·I + m_d − a2d`, `c = −l1·N·E(1−k)`.
pub fn coexist_quadratic_coeffs(p: &ModelParams, n: f64, i: f64, e: f64) -> [f64; 3] {
    [p.b2, p.g1 * i + p.m_d - p.a2 * p.d, -p.l1 * n * e * p.unblocked()]
}

/// Number of positive roots of `a·x² + b·x + c` with `a > 0`, double roots counted once.
pub fn positive_root_count(a: f64, b: f64, c: f64) -> usize {
    if c < 0.0 {
        1
    } else if c == 0.0 {
        usize::from(-b / a > 0.0)
    } else if b >= 0.0 {
        0
    } else {
        let disc = b * b - 4.0 * a * c;
        match disc.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => 2,
            Some(std::cmp::Ordering::Equal) => 1,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub form: String,
    /// Power of the variable this coefficient multiplies.
    pub power: usize,
    pub derived: f64,
    pub printed: f64,
    pub rel_deviation: f64,
}

/// Compares two descending coefficient lists of equal length after scaling both
/// so the derived form's largest coefficient becomes one.
pub fn compare_forms(form: &str, derived: &[f64], printed: &[f64]) -> Vec<Mismatch> {
    let pivot = derived
        .iter()
        .enumerate()
        .fold((0, 0.0_f64), |best, (k, c)| if c.abs() > best.1.abs() { (k, *c) } else { best });
    let d_scale = if pivot.1 == 0.0 { 1.0 } else { pivot.1 };
    let p_scale = if printed[pivot.0] == 0.0 { 1.0 } else { printed[pivot.0] };
    let n = derived.len();
    derived
        .iter()
        .zip(printed)
        .enumerate()
        .map(|(k, (&d, &pr))| {
            let dn = d / d_scale;
            let pn = pr / p_scale;
            let denom = dn.abs().max(pn.abs());
            Mismatch {
                form: form.to_string(),
                power: n - 1 - k,
                derived: d,
                printed: pr,
                rel_deviation: if denom == 0.0 { 0.0 } else { (dn - pn).abs() / denom },
            }
        })
        .collect()
}

/// Cubic pair evaluated at one type-2 dead state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dead2Cubic {
    pub t: f64,
    pub c: f64,
    pub printed: Polynomial,
    pub derived: Polynomial,
    /// `|ν(T)| / Σ|c_i||T|^(3−i)` for the printed cubic at the located `T`.
    pub printed_residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReducedPolynomials {
    pub dead1_quadratic: Option<Polynomial>,
    pub dead1_quadratic_printed: Option<Polynomial>,
    pub dead2_quartic: Option<Polynomial>,
    pub dead2_cubic: Vec<Dead2Cubic>,
    pub coexist_quadratic: Vec<Polynomial>,
    pub mismatch_report: Vec<Mismatch>,
}

impl ReducedPolynomials {
    /// Whether every printed form agrees with its derivation to `1e-12`.
    pub fn printed_confirmed(&self) -> bool {
        self.mismatch_report.iter().all(|m| m.rel_deviation < 1e-12)
    }

    pub fn build(p: &ModelParams) -> Self {
        let e = p.estrogen_star();
        let d1 = dead1_quadratic_coeffs(p, e);
        let d1p = dead1_quadratic_printed_coeffs(p, e);
        let mut report = compare_forms("dead1_quadratic", &d1, &d1p);
        report.extend(compare_forms(
            "dead2_cubic",
            &dead2_cubic_derived_coeffs(p, dead2_c(p, e, 0.0)),
            &dead2_cubic_printed_coeffs(p, dead2_c(p, e, 0.0)),
        ));
        Self {
            dead1_quadratic: Polynomial::trimmed(&d1, TRIM_TOL).ok(),
            dead1_quadratic_printed: Polynomial::trimmed(&d1p, TRIM_TOL).ok(),
            dead2_quartic: Polynomial::trimmed(&dead2_quartic_coeffs(p, e), TRIM_TOL).ok(),
            dead2_cubic: Vec::new(),
            coexist_quadratic: Vec::new(),
            mismatch_report: report,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartic_matches_direct_evaluation() {
        let p = ModelParams::default();
        let e = p.estrogen_star();
        let q = Polynomial::new(dead2_quartic_coeffs(&p, e)).unwrap();
        let (q0, q1) = saturation_terms(&p);
        for t in [0.05, 0.2, 0.4] {
            let i = (p.a2 * p.d - p.m_d - p.b2 * t) / p.g1;
            let m = drug_level(&p, i).unwrap();
            let x = crate::model::SystemState::new(0.0, t, i, e, m);
            let di = crate::model::rhs(&x, &p).unwrap()[2];
            let scale = (p.o + t) * (q0 + q1 * i);
            assert!((q.eval(t) - di * scale).abs() < 1e-12, "{t}");
        }
    }

    #[test]
    fn derived_cubic_matches_direct_expansion() {
        let p = ModelParams::default();
        let c = 0.07;
        let cub = dead2_cubic_derived_coeffs(&p, c);
        for t in [0.1_f64, 0.3, 0.9] {
            let i = (p.a2 * p.d - p.m_d - p.b2 * t) / p.g1;
            let direct = p.s * p.g1 * (p.o + t)
                + p.g1 * i * (p.r * t - (p.g2 * t + p.m + c) * (p.o + t));
            let val = cub.iter().fold(0.0, |a, k| a * t + k);
            assert!((val - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn descartes_cases() {
        assert_eq!(positive_root_count(1.0, 2.0, 1.0), 0);
        assert_eq!(positive_root_count(1.0, 2.0, -1.0), 1);
        assert_eq!(positive_root_count(1.0, -2.0, -1.0), 1);
        assert_eq!(positive_root_count(1.0, -3.0, 2.0), 2);
        assert_eq!(positive_root_count(1.0, -2.0, 1.0), 1);
        assert_eq!(positive_root_count(1.0, -1.0, 1.0), 0);
        assert_eq!(positive_root_count(1.0, -1.0, 0.0), 1);
    }

    #[test]
    fn identical_forms_report_no_deviation() {
        let r = compare_forms("x", &[2.0, -4.0, 1.0], &[-1.0, 2.0, -0.5]);
        assert!(r.iter().all(|m| m.rel_deviation < 1e-15));
        assert_eq!(r[0].power, 2);
    }
}
