//! Independent reference computations shared by the integration tests and
//! the acceptance harness. Nothing here calls into the algorithms it checks,
//! apart from the vector field where a test says so.
#![allow(dead_code)]

use erbc_core::{ModelParams, SystemState};
use num_complex::Complex64;
use rand::Rng;

/// Each term of each equation, written out from the model equations.
pub fn rhs_terms(x: &SystemState, p: &ModelParams) -> [Vec<f64>; 5] {
    let (n, t, i, e, m) = (x.n, x.t, x.i, x.e, x.m);
    let u = 1.0 - p.k;
    [
        vec![p.a1 * n, -p.b1 * n * n, -p.d1 * t * n / (1.0 + p.epsilon * t), -p.l1 * n * e * u],
        vec![p.a2 * p.d * t, -p.b2 * t * t, -p.g1 * i * t, -p.m_d * t, p.l1 * n * e * u],
        vec![
            p.s,
            p.r * i * t / (p.o + t),
            -p.g2 * i * t,
            -p.m * i,
            -p.l3 * i * e * u / (p.g + e),
            p.p_m * i * m / (p.j_m + m),
        ],
        vec![p.p * u, -p.theta * e],
        vec![p.v_m, -p.n_m * m, p.chi * m * i / (p.xi + i)],
    ]
}

pub fn rhs_oracle(x: &SystemState, p: &ModelParams) -> ([f64; 5], [f64; 5]) {
    let terms = rhs_terms(x, p);
    let sum = std::array::from_fn(|k| terms[k].iter().sum());
    let scale = std::array::from_fn(|k| terms[k].iter().map(|v| v.abs()).sum());
    (sum, scale)
}

/// Central differences with one Richardson step, `O(h⁴)`.
pub fn fd_jacobian<F: Fn(&[f64; 5]) -> [f64; 5]>(f: F, x: [f64; 5]) -> [[f64; 5]; 5] {
    let mut out = [[0.0; 5]; 5];
    for b in 0..5 {
        let h = 1e-3 * x[b].abs().max(1.0);
        let d = |h: f64| {
            let (mut up, mut dn) = (x, x);
            up[b] += h;
            dn[b] -= h;
            let (fu, fd) = (f(&up), f(&dn));
            std::array::from_fn::<f64, 5, _>(|a| (fu[a] - fd[a]) / (2.0 * h))
        };
        let (d1, d2) = (d(h), d(0.5 * h));
        for a in 0..5 {
            out[a][b] = (4.0 * d2[a] - d1[a]) / 3.0;
        }
    }
    out
}

/// Real parts in `[-3, 3]`; complex roots come in conjugate pairs.
pub fn planted_roots<R: Rng>(r: &mut R, degree: usize) -> Vec<Complex64> {
    let mut roots = Vec::with_capacity(degree);
    while roots.len() < degree {
        let re = r.gen_range(-3.0..3.0);
        if roots.len() + 2 <= degree && r.gen_bool(0.5) {
            let im = r.gen_range(0.05..3.0);
            roots.push(Complex64::new(re, im));
            roots.push(Complex64::new(re, -im));
        } else {
            roots.push(Complex64::new(re, 0.0));
        }
    }
    roots
}

/// Monic coefficients, highest power first, by repeated multiplication by `(λ − z)`.
pub fn expand_roots(roots: &[Complex64]) -> Vec<f64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for z in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (k, a) in c.iter().enumerate() {
            next[k] += a;
            next[k + 1] -= a * z;
        }
        c = next;
    }
    c.iter().map(|z| z.re).collect()
}

/// Laplace expansion along the first row.
pub fn cofactor_det(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if n == 1 {
        return a[0][0];
    }
    (0..n)
        .map(|col| {
            let minor: Vec<Vec<f64>> =
                a[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != col).map(|(_, v)| *v).collect()).collect();
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            sign * a[0][col] * cofactor_det(&minor)
        })
        .sum()
}

/// Companion matrix of a monic polynomial, highest power first.
pub fn companion(monic: &[f64]) -> Vec<Vec<f64>> {
    let n = monic.len() - 1;
    let mut m = vec![vec![0.0; n]; n];
    for j in 0..n {
        m[0][j] = -monic[j + 1];
    }
    for i in 1..n {
        m[i][i - 1] = 1.0;
    }
    m
}

/// Matching of two multisets of complex numbers within `tol`.
pub fn same_multiset(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|z| {
        let best = (0..b.len()).filter(|&j| !used[j]).min_by(|&x, &y| (b[x] - z).norm().total_cmp(&(b[y] - z).norm()));
        match best {
            Some(j) if (b[j] - z).norm() <= tol * (1.0 + z.norm()) => {
                used[j] = true;
                true
            }
            _ => false,
        }
    })
}

/// Eigenvalues of a real 2×2 matrix.
pub fn eig2(a: f64, b: f64, c: f64, d: f64) -> [Complex64; 2] {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = Complex64::new(tr * tr / 4.0 - det, 0.0).sqrt();
    [Complex64::new(tr / 2.0, 0.0) + disc, Complex64::new(tr / 2.0, 0.0) - disc]
}

/// Immune level of the `T = 0` states: root of the immune balance with the drug
/// at its own balance, by bisection on `[0, I_max)`. `None` when there is no sign change.
pub fn immune_at_no_tumor(p: &ModelParams) -> Option<(f64, f64)> {
    let e = p.p * (1.0 - p.k) / p.theta;
    let drug = |i: f64| {
        let den = p.n_m - p.chi * i / (p.xi + i);
        (den > 0.0).then(|| p.v_m / den)
    };
    let f = |i: f64| {
        let m = drug(i)?;
        Some(p.s - p.m * i - p.l3 * i * e * (1.0 - p.k) / (p.g + e) + p.p_m * i * m / (p.j_m + m))
    };
    let mut hi = 1.0;
    while f(hi)? > 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return None;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let i = 0.5 * (lo + hi);
    Some((i, drug(i)?))
}

/// Classic fixed-step RK4 on `f`.
pub fn rk4<F: Fn(&[f64; 5]) -> [f64; 5]>(f: F, x0: [f64; 5], t_end: f64, steps: usize) -> [f64; 5] {
    let h = t_end / steps as f64;
    let mut x = x0;
    let add = |x: &[f64; 5], k: &[f64; 5], s: f64| std::array::from_fn::<f64, 5, _>(|i| x[i] + s * k[i]);
    for _ in 0..steps {
        let k1 = f(&x);
        let k2 = f(&add(&x, &k1, h / 2.0));
        let k3 = f(&add(&x, &k2, h / 2.0));
        let k4 = f(&add(&x, &k3, h));
        x = std::array::from_fn(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    }
    x
}

/// Plain Newton on the full five-dimensional field with a finite-difference
/// Jacobian and Gaussian elimination. Returns the point if it converged.
pub fn newton_full<F: Fn(&[f64; 5]) -> [f64; 5]>(f: F, x0: [f64; 5], iters: usize) -> Option<[f64; 5]> {
    let mut x = x0;
    for _ in 0..iters {
        let fx = f(&x);
        if fx.iter().all(|v| v.abs() < 1e-13) {
            return Some(x);
        }
        let j = fd_jacobian(&f, x);
        let mut a: Vec<Vec<f64>> = (0..5).map(|r| {
            let mut row = j[r].to_vec();
            row.push(-fx[r]);
            row
        }).collect();
        for c in 0..5 {
            let piv = (c..5).max_by(|&p, &q| a[p][c].abs().total_cmp(&a[q][c].abs()))?;
            if a[piv][c].abs() < 1e-14 {
                return None;
            }
            a.swap(c, piv);
            for r in c + 1..5 {
                let f = a[r][c] / a[c][c];
                for k in c..6 {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
        let mut dx = [0.0; 5];
        for r in (0..5).rev() {
            let s: f64 = (r + 1..5).map(|k| a[r][k] * dx[k]).sum();
            dx[r] = (a[r][5] - s) / a[r][r];
        }
        for k in 0..5 {
            x[k] += dx[k];
        }
        if x.iter().any(|v| !v.is_finite() || v.abs() > 1e8) {
            return None;
        }
    }
    f(&x).iter().all(|v| v.abs() < 1e-10).then_some(x)
}
