//! Small dense matrices: characteristic polynomials, eigenvalues, determinants
//! and linear solves for dimensions up to five.

use num_complex::Complex64;

use super::poly::Polynomial;
use super::roots::{poly_roots, RootSet};
use crate::error::{ModelError, Result};

pub type Matrix5 = [[f64; 5]; 5];

pub fn trace<const K: usize>(a: &[[f64; K]; K]) -> f64 {
    (0..K).map(|i| a[i][i]).sum()
}

fn matmul<const K: usize>(a: &[[f64; K]; K], b: &[[f64; K]; K]) -> [[f64; K]; K] {
    let mut c = [[0.0; K]; K];
    for i in 0..K {
        for k in 0..K {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..K {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

/// Coefficients of `det(λI − A)` (monic, descending) by the Faddeev–LeVerrier recurrence.
pub fn char_poly<const K: usize>(a: &[[f64; K]; K]) -> Result<Polynomial> {
    if a.iter().flatten().any(|v| !v.is_finite()) {
        return Err(ModelError::NonFinite { what: "matrix".into() });
    }
    let mut coeffs = vec![0.0; K + 1];
    coeffs[0] = 1.0;
    let mut m = [[0.0; K]; K];
    for k in 1..=K {
        let mut next = matmul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += coeffs[k - 1];
        }
        m = next;
        let am = matmul(a, &m);
        coeffs[k] = -trace(&am) / k as f64;
    }
    Polynomial::new(coeffs)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det<const K: usize>(a: &[[f64; K]; K]) -> f64 {
    let mut m = *a;
    let mut d = 1.0;
    for col in 0..K {
        let piv = (col..K).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs())).unwrap();
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            d = -d;
        }
        d *= m[col][col];
        for r in col + 1..K {
            let f = m[r][col] / m[col][col];
            for c in col..K {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    d
}

/// `(det(zI − A), trace((zI − A)⁻¹))` by complex Gauss–Jordan elimination.
/// Returns `None` when `zI − A` is exactly singular.
fn resolvent<const K: usize>(a: &[[f64; K]; K], z: Complex64) -> Option<(Complex64, Complex64)> {
    let zero = Complex64::new(0.0, 0.0);
    let mut m = [[zero; K]; K];
    let mut inv = [[zero; K]; K];
    for i in 0..K {
        for j in 0..K {
            m[i][j] = Complex64::new(-a[i][j], 0.0);
        }
        m[i][i] += z;
        inv[i][i] = Complex64::new(1.0, 0.0);
    }
    let mut d = Complex64::new(1.0, 0.0);
    for col in 0..K {
        let piv = (col..K).max_by(|&x, &y| m[x][col].norm().total_cmp(&m[y][col].norm()))?;
        if m[piv][col].norm() == 0.0 {
            return None;
        }
        if piv != col {
            m.swap(piv, col);
            inv.swap(piv, col);
            d = -d;
        }
        let p = m[col][col];
        d *= p;
        for c in 0..K {
            m[col][c] /= p;
            inv[col][c] /= p;
        }
        for r in 0..K {
            if r == col {
                continue;
            }
            let f = m[r][col];
            if f == zero {
                continue;
            }
            for c in 0..K {
                let mc = m[col][c];
                let ic = inv[col][c];
                m[r][c] -= f * mc;
                inv[r][c] -= f * ic;
            }
        }
    }
    let tr = (0..K).map(|i| inv[i][i]).sum();
    Some((d, tr))
}

/// Newton on `det(zI − A)` using `d/dz log det = trace((zI − A)⁻¹)`; a step is
/// kept only while it lowers `|det|`.
fn polish_eigenvalue<const K: usize>(a: &[[f64; K]; K], z0: Complex64) -> Complex64 {
    let Some((mut best_det, mut tr)) = resolvent(a, z0) else { return z0 };
    let mut best = z0;
    for _ in 0..6 {
        if tr.norm() == 0.0 || !tr.is_finite() {
            break;
        }
        let cand = best - tr.inv();
        match resolvent(a, cand) {
            None => return cand,
            Some((d, t)) if d.norm() < best_det.norm() => {
                best = cand;
                best_det = d;
                tr = t;
            }
            _ => break,
        }
    }
    best
}

/// Eigenvalues as the roots of the characteristic polynomial, each polished
/// against the matrix itself.
pub fn eigenvalues<const K: usize>(a: &[[f64; K]; K]) -> Result<RootSet> {
    let cp = char_poly(a)?;
    let mut rs = poly_roots(&cp)?;
    for z in rs.roots.iter_mut() {
        let polished = polish_eigenvalue(a, *z);
        if (polished - *z).norm() <= 1e-6 * (1.0 + z.norm()) {
            *z = if z.im == 0.0 { Complex64::new(polished.re, 0.0) } else { polished };
        }
    }
    // keep conjugate pairs exact after independent polishing
    let n = rs.roots.len();
    for i in 0..n {
        if rs.roots[i].im > 0.0 {
            if let Some(j) = (0..n)
                .filter(|&j| rs.roots[j].im < 0.0)
                .min_by(|&x, &y| {
                    (rs.roots[x] - rs.roots[i].conj()).norm().total_cmp(&(rs.roots[y] - rs.roots[i].conj()).norm())
                })
            {
                rs.roots[j] = rs.roots[i].conj();
            }
        }
    }
    rs.roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    rs.residuals = rs.roots.iter().map(|&z| cp.relative_residual(z)).collect();
    Ok(rs)
}

/// Solves `A x = b` for a dense `n × n` system stored row-major.
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut x = b.to_vec();
    let scale = m.iter().flatten().fold(0.0_f64, |s, v| s.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return Err(ModelError::SingularJacobian);
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| m[r][col].abs().total_cmp(&m[s][col].abs())).unwrap();
        if m[piv][col].abs() <= 1e-14 * scale {
            return Err(ModelError::SingularJacobian);
        }
        m.swap(piv, col);
        x.swap(piv, col);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            x[r] -= f * x[col];
        }
    }
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (x[r] - s) / m[r][r];
    }
    Ok(x)
}
