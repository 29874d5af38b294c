use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

pub const MAX_DEGREE: usize = 8;

/// Real polynomial, coefficients in descending degree, leading coefficient nonzero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(ModelError::InvalidInput("empty coefficient list".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(ModelError::NonFinite { what: "polynomial coefficients".into() });
        }
        if coeffs[0] == 0.0 {
            return Err(ModelError::InvalidInput("leading coefficient is zero".into()));
        }
        if coeffs.len() - 1 > MAX_DEGREE {
            return Err(ModelError::InvalidInput(format!(
                "degree {} exceeds supported maximum {MAX_DEGREE}",
                coeffs.len() - 1
            )));
        }
        Ok(Self { coeffs })
    }

    /// Drops leading coefficients whose magnitude is at most `rel_tol` times the
    /// largest coefficient, then constructs the polynomial.
    pub fn trimmed(coeffs: &[f64], rel_tol: f64) -> Result<Self> {
        let scale = coeffs.iter().fold(0.0_f64, |a, c| a.max(c.abs()));
        let start = coeffs
            .iter()
            .position(|c| c.abs() > rel_tol * scale)
            .ok_or_else(|| ModelError::InvalidInput("all coefficients vanish".into()))?;
        Self::new(coeffs[start..].to_vec())
    }

    /// Monic polynomial with the given complex roots; imaginary parts of the
    /// expanded coefficients are dropped, so roots should be conjugate-closed.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i] += ci;
                next[i + 1] -= ci * r;
            }
            c = next;
        }
        Self { coeffs: c.into_iter().map(|z| z.re).collect() }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `(p(z), p'(z))` by one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in &self.coeffs {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `Σ |c_i| |z|^(n−i)`: the natural scale for `|p(z)|` at `z`.
    pub fn abs_scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().fold(0.0, |acc, &c| acc * r + c.abs())
    }

    /// Backward-error style residual `|p(z)| / Σ|c_i||z|^(n−i)`.
    pub fn relative_residual(&self, z: Complex64) -> f64 {
        let scale = self.abs_scale(z);
        if scale == 0.0 {
            0.0
        } else {
            self.eval_complex(z).norm() / scale
        }
    }

    pub fn negated(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn monic(&self) -> Self {
        let l = self.coeffs[0];
        Self { coeffs: self.coeffs.iter().map(|c| c / l).collect() }
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_rules() {
        assert!(Polynomial::new(vec![]).is_err());
        assert!(Polynomial::new(vec![0.0, 1.0]).is_err());
        assert!(Polynomial::new(vec![1.0, f64::NAN]).is_err());
        assert!(Polynomial::new(vec![1.0; 10]).is_err());
        let p = Polynomial::trimmed(&[0.0, 1e-20, 2.0, 1.0], 1e-14).unwrap();
        assert_eq!(p.coeffs(), &[2.0, 1.0]);
    }

    #[test]
    fn from_roots_expands() {
        let p = Polynomial::from_roots(&[Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)]);
        assert_eq!(p.coeffs(), &[1.0, -3.0, 2.0]);
        let p = Polynomial::from_roots(&[Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)]);
        assert_eq!(p.coeffs(), &[1.0, 0.0, 1.0]);
    }

    #[test]
    fn horner_with_derivative() {
        let p = Polynomial::new(vec![2.0, -3.0, 0.0, 5.0]).unwrap();
        let (v, d) = p.eval_with_derivative(Complex64::new(2.0, 0.0));
        assert_eq!(v.re, 2.0 * 8.0 - 3.0 * 4.0 + 5.0);
        assert_eq!(d.re, 6.0 * 4.0 - 6.0 * 2.0);
        assert_eq!(p.eval(2.0), v.re);
    }
}
