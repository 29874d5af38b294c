//! Routh–Hurwitz classification from the leading principal minors of the
//! Hurwitz matrix.

use serde::{Deserialize, Serialize};

use super::poly::Polynomial;
use crate::error::{ModelError, Result};

/// Minors (and coefficients) within this distance of zero make the test inconclusive.
pub const MINOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Unstable,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurwitzVerdict {
    /// `Δ1 … Δn` of the normalized polynomial.
    pub minors: Vec<f64>,
    /// Coefficients after normalization (monic, roots rescaled to unit size).
    pub normalized: Vec<f64>,
    /// Routh first column `Δk / Δ(k−1)`, with `Δ0 = 1`.
    pub routh_column: Vec<f64>,
    pub all_positive: bool,
    pub verdict: Verdict,
}

fn det_dyn(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut d = 1.0;
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs())).unwrap();
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            d = -d;
        }
        d *= m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    d
}

/// `n × n` Hurwitz matrix of `b0 λⁿ + b1 λⁿ⁻¹ + … + bn`, entry `(i, j) = b_{2j−i+1}`.
pub fn hurwitz_matrix(b: &[f64]) -> Vec<Vec<f64>> {
    let n = b.len() - 1;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let k = 2 * j as isize - i as isize + 1;
                    if k < 0 || k as usize > n {
                        0.0
                    } else {
                        b[k as usize]
                    }
                })
                .collect()
        })
        .collect()
}

/// Classifies the root locations of `p`.
///
/// The polynomial is made monic and its variable rescaled so the largest
/// `|b_k|^(1/k)` is one; the sign pattern of the minors is unchanged by this.
/// A clearly negative coefficient is decisive (unstable) on its own; otherwise
/// a minor within [`MINOR_TOL`] of zero, relative to the minor before it,
/// yields [`Verdict::Inconclusive`]. The relative test keeps a widely spread
/// but stable spectrum (whose last minors are products of small roots) out of
/// the marginal band.
pub fn routh_hurwitz(p: &Polynomial) -> Result<HurwitzVerdict> {
    let c = p.coeffs();
    if c[0] == 0.0 {
        return Err(ModelError::InvalidInput("zero leading coefficient".into()));
    }
    let n = p.degree();
    if n == 0 {
        return Err(ModelError::InvalidInput("constant polynomial".into()));
    }
    let monic: Vec<f64> = c.iter().map(|v| v / c[0]).collect();
    let rho = (1..=n)
        .filter(|&k| monic[k] != 0.0)
        .map(|k| monic[k].abs().powf(1.0 / k as f64))
        .fold(0.0_f64, f64::max);
    let rho = if rho > 0.0 && rho.is_finite() { rho } else { 1.0 };
    let b: Vec<f64> = monic.iter().enumerate().map(|(k, v)| v / rho.powi(k as i32)).collect();

    let h = hurwitz_matrix(&b);
    let minors: Vec<f64> = (1..=n)
        .map(|k| det_dyn(h[..k].iter().map(|row| row[..k].to_vec()).collect()))
        .collect();

    let mut prev = 1.0;
    let mut routh_column = Vec::with_capacity(n);
    for &d in &minors {
        routh_column.push(if prev == 0.0 { 0.0 } else { d / prev });
        prev = d;
    }

    let coeff_negative = b[1..].iter().any(|&v| v < -MINOR_TOL);
    let coeff_positive = b[1..].iter().all(|&v| v > MINOR_TOL);
    let minor_marginal = routh_column.iter().any(|r| r.abs() <= MINOR_TOL);
    let minors_positive = minors.iter().all(|&d| d > 0.0) && !minor_marginal;
    let all_positive = coeff_positive && minors_positive;

    let verdict = if all_positive {
        Verdict::Stable
    } else if coeff_negative {
        Verdict::Unstable
    } else if minor_marginal || !coeff_positive {
        Verdict::Inconclusive
    } else {
        Verdict::Unstable
    };
    Ok(HurwitzVerdict { minors, normalized: b, routh_column, all_positive, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(c: &[f64]) -> Verdict {
        routh_hurwitz(&Polynomial::new(c.to_vec()).unwrap()).unwrap().verdict
    }

    #[test]
    fn textbook_quadratics() {
        assert_eq!(verdict(&[1.0, 3.0, 2.0]), Verdict::Stable);
        assert_eq!(verdict(&[1.0, -1.0, 2.0]), Verdict::Unstable);
    }

    #[test]
    fn negative_leading_is_normalized() {
        // −(λ+1)(λ+2)(λ+3)
        assert_eq!(verdict(&[-1.0, -6.0, -11.0, -6.0]), Verdict::Stable);
    }

    #[test]
    fn imaginary_pair_is_inconclusive() {
        // (λ² + 1)(λ + 1)
        assert_eq!(verdict(&[1.0, 1.0, 1.0, 1.0]), Verdict::Inconclusive);
    }

    #[test]
    fn positive_coefficients_but_unstable() {
        // (λ − 0.1 ± 2i)(λ + 5): all coefficients positive, Δ2 < 0
        let p = Polynomial::from_roots(&[
            num_complex::Complex64::new(0.1, 2.0),
            num_complex::Complex64::new(0.1, -2.0),
            num_complex::Complex64::new(-5.0, 0.0),
        ]);
        assert!(p.coeffs().iter().all(|&c| c > 0.0));
        assert_eq!(routh_hurwitz(&p).unwrap().verdict, Verdict::Unstable);
    }

    #[test]
    fn scale_invariance() {
        // roots −1e-3, −2e-3: tiny raw minors, still stable
        assert_eq!(verdict(&[1.0, 3e-3, 2e-6]), Verdict::Stable);
    }

    #[test]
    fn spread_spectrum_stays_conclusive() {
        let roots: Vec<_> = [-3.72, -0.5, -0.216, -0.075, -0.033]
            .iter()
            .map(|&r| num_complex::Complex64::new(r, 0.0))
            .collect();
        let hv = routh_hurwitz(&Polynomial::from_roots(&roots)).unwrap();
        assert!(hv.minors[4] < 1e-12);
        assert_eq!(hv.verdict, Verdict::Stable);
    }

    #[test]
    fn minors_for_cubic() {
        let hv = routh_hurwitz(&Polynomial::new(vec![1.0, 6.0, 11.0, 6.0]).unwrap()).unwrap();
        assert_eq!(hv.minors.len(), 3);
        let rho = 6.0_f64;
        let b = [1.0, 6.0 / rho, 11.0 / rho.powi(2), 6.0 / rho.powi(3)];
        assert!((hv.minors[0] - b[1]).abs() < 1e-15);
        assert!((hv.minors[1] - (b[1] * b[2] - b[3])).abs() < 1e-15);
        assert!((hv.minors[2] - b[3] * hv.minors[1]).abs() < 1e-15);
    }
}
