//! Simultaneous root iteration (Aberth–Ehrlich) for real polynomials.

use std::f64::consts::PI;

use num_complex::Complex64;
use super::poly::Polynomial;
use crate::error::{ModelError, Result};

pub const ROOT_TOL: f64 = 1e-12;
pub const MAX_ROOT_ITERATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// `|p(z)| / Σ|c_i||z|^(n−i)` at each root.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

impl RootSet {
    pub fn max_real(&self) -> f64 {
        self.roots.iter().fold(f64::NEG_INFINITY, |a, z| a.max(z.re))
    }

    /// Roots whose imaginary part is within `tol·(1+|z|)` of zero, as reals.
    pub fn real_roots(&self, tol: f64) -> Vec<f64> {
        self.roots.iter().filter(|z| z.im.abs() <= tol * (1.0 + z.norm())).map(|z| z.re).collect()
    }
}

fn initial_guesses(p: &Polynomial) -> Vec<Complex64> {
    let c = p.coeffs();
    let n = p.degree();
    let lead = c[0];
    let center = -c[1] / (n as f64 * lead);
    let radius = (1..=n)
        .map(|k| (c[k] / lead).abs().powf(1.0 / k as f64))
        .fold(0.0_f64, f64::max)
        .max(1e-3);
    (0..n)
        .map(|k| {
            let angle = 2.0 * PI * k as f64 / n as f64 + 0.4;
            Complex64::new(center, 0.0) + Complex64::from_polar(radius, angle)
        })
        .collect()
}

/// Pairs each non-real root with its nearest conjugate partner and symmetrizes
/// the pair; roots that stay unpaired are made real.
fn enforce_conjugate_closure(roots: &mut [Complex64]) {
    let n = roots.len();
    let near_real = |z: Complex64| z.im.abs() <= 1e-10 * (1.0 + z.norm());
    let mut used = vec![false; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| roots[b].im.abs().total_cmp(&roots[a].im.abs()));
    for &a in &order {
        if used[a] {
            continue;
        }
        used[a] = true;
        let za = roots[a];
        if near_real(za) {
            roots[a].im = 0.0;
            continue;
        }
        let target = za.conj();
        let partner = (0..n)
            .filter(|&b| !used[b])
            .min_by(|&x, &y| (roots[x] - target).norm().total_cmp(&(roots[y] - target).norm()))
            .filter(|&b| (roots[b] - target).norm() <= 1e-6 * (1.0 + za.norm()));
        match partner {
            Some(b) => {
                used[b] = true;
                let upper = if za.im > 0.0 { (za + roots[b].conj()) * 0.5 } else { (za.conj() + roots[b]) * 0.5 };
                roots[a] = if za.im > 0.0 { upper } else { upper.conj() };
                roots[b] = roots[a].conj();
            }
            None => roots[a].im = 0.0,
        }
    }
}

/// Newton polish on a single real root, kept only when it lowers the residual.
fn polish_real(p: &Polynomial, x: f64) -> f64 {
    let mut best = x;
    let mut best_res = p.relative_residual(Complex64::new(x, 0.0));
    let mut cur = x;
    for _ in 0..4 {
        let (v, d) = p.eval_with_derivative(Complex64::new(cur, 0.0));
        if d.re == 0.0 {
            break;
        }
        cur -= v.re / d.re;
        let res = p.relative_residual(Complex64::new(cur, 0.0));
        if res < best_res {
            best = cur;
            best_res = res;
        } else {
            break;
        }
    }
    best
}

/// All complex roots of `p`, sorted by real then imaginary part.
pub fn poly_roots(p: &Polynomial) -> Result<RootSet> {
    let n = p.degree();
    if n == 0 {
        return Err(ModelError::InvalidInput("polynomial of degree 0 has no roots".into()));
    }
    if n == 1 {
        let c = p.coeffs();
        let z = Complex64::new(-c[1] / c[0], 0.0);
        return Ok(RootSet { residuals: vec![p.relative_residual(z)], roots: vec![z], iterations: 0 });
    }

    let mut z = initial_guesses(p);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ROOT_ITERATIONS {
        iterations += 1;
        let mut all_small = true;
        for k in 0..n {
            let (v, d) = p.eval_with_derivative(z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let offset = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if offset.is_finite() {
                z[k] -= offset;
            }
            if p.relative_residual(z[k]) >= ROOT_TOL {
                all_small = false;
            }
        }
        if all_small {
            converged = true;
            break;
        }
    }

    let residuals: Vec<f64> = z.iter().map(|&r| p.relative_residual(r)).collect();
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    if !converged {
        return Err(ModelError::RootsNotConverged { iterations, worst_residual: worst, best: z });
    }

    enforce_conjugate_closure(&mut z);
    for r in z.iter_mut() {
        if r.im == 0.0 {
            r.re = polish_real(p, r.re);
        }
    }
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let residuals = z.iter().map(|&r| p.relative_residual(r)).collect();
    Ok(RootSet { roots: z, residuals, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64]) -> Polynomial {
        Polynomial::new(c.to_vec()).unwrap()
    }

    #[test]
    fn quadratic_real_roots() {
        let rs = poly_roots(&poly(&[1.0, -3.0, 2.0])).unwrap();
        assert!((rs.roots[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((rs.roots[1] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        assert_eq!(rs.roots[0].im, 0.0);
    }

    #[test]
    fn quadratic_imaginary_pair() {
        let rs = poly_roots(&poly(&[1.0, 0.0, 1.0])).unwrap();
        assert!((rs.roots[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((rs.roots[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert_eq!(rs.roots[0], rs.roots[1].conj());
    }

    #[test]
    fn linear_and_constant() {
        let rs = poly_roots(&poly(&[2.0, -1.0])).unwrap();
        assert_eq!(rs.roots, vec![Complex64::new(0.5, 0.0)]);
        assert!(poly_roots(&poly(&[3.0])).is_err());
    }

    #[test]
    fn repeated_root_converges() {
        let rs = poly_roots(&poly(&[1.0, -2.0, 1.0])).unwrap();
        for z in &rs.roots {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn widely_scaled_roots() {
        let roots: Vec<Complex64> =
            [-1e3, -1.0, -1e-3, 0.5].iter().map(|&r| Complex64::new(r, 0.0)).collect();
        let p = Polynomial::from_roots(&roots);
        let rs = poly_roots(&p).unwrap();
        for (got, want) in rs.roots.iter().zip(&roots) {
            assert!((got - want).norm() <= 1e-9 * (1.0 + want.norm()), "{got} vs {want}");
        }
    }
}
