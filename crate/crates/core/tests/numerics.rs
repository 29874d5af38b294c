mod oracle;

use erbc_core::numerics::{char_poly, det, eigenvalues, poly_roots, routh_hurwitz, verdict_from_max_real, Polynomial, Verdict};
use erbc_core::sampling::rng;
use num_complex::Complex64;
use rand::Rng;

#[test]
fn roots_recover_planted_values() {
    let mut r = rng(201);
    for _ in 0..500 {
        let degree = r.gen_range(1..=6);
        let roots = oracle::planted_roots(&mut r, degree);
        // Separate the planted roots so the comparison is well conditioned.
        let close = roots.iter().enumerate().any(|(i, a)| roots[i + 1..].iter().any(|b| (a - b).norm() < 0.05));
        if close {
            continue;
        }
        let p = Polynomial::new(oracle::expand_roots(&roots)).unwrap();
        let found = poly_roots(&p).unwrap();
        assert!(oracle::same_multiset(&found.roots, &roots, 1e-7), "{:?} vs {roots:?}", found.roots);
    }
}

#[test]
fn vieta_relations_hold() {
    let mut r = rng(202);
    for _ in 0..1000 {
        let degree = r.gen_range(1..=5);
        let roots = oracle::planted_roots(&mut r, degree);
        let c = oracle::expand_roots(&roots);
        let found = poly_roots(&Polynomial::new(c.clone()).unwrap()).unwrap().roots;
        let sum: Complex64 = found.iter().sum();
        let prod: Complex64 = found.iter().product();
        let sign = if degree % 2 == 0 { 1.0 } else { -1.0 };
        let norm = c.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
        assert!((sum.re + c[1]).abs() < 1e-9 * norm && sum.im.abs() < 1e-9 * norm);
        assert!((prod.re - sign * c[degree]).abs() < 1e-9 * norm && prod.im.abs() < 1e-9 * norm);
    }
}

#[test]
fn determinant_matches_cofactor_expansion() {
    let mut r = rng(203);
    for _ in 0..300 {
        let a: [[f64; 5]; 5] = std::array::from_fn(|_| std::array::from_fn(|_| r.gen_range(-2.0..2.0)));
        let rows: Vec<Vec<f64>> = a.iter().map(|row| row.to_vec()).collect();
        let want = oracle::cofactor_det(&rows);
        assert!((det(&a) - want).abs() < 1e-11 * (1.0 + want.abs()));
    }
}

#[test]
fn char_poly_of_companion_matrix_is_the_polynomial() {
    let mut r = rng(204);
    for _ in 0..300 {
        let roots = oracle::planted_roots(&mut r, 5);
        let monic = oracle::expand_roots(&roots);
        let c = oracle::companion(&monic);
        let a: [[f64; 5]; 5] = std::array::from_fn(|i| std::array::from_fn(|j| c[i][j]));
        let cp = char_poly(&a).unwrap();
        let cp = cp.monic();
        for (x, y) in cp.coeffs().iter().zip(&monic) {
            assert!((x - y).abs() < 1e-10 * (1.0 + y.abs()));
        }
        let eig = eigenvalues(&a).unwrap();
        let rebuilt = oracle::expand_roots(&eig.roots);
        for (x, y) in rebuilt.iter().zip(&monic) {
            assert!((x - y).abs() < 1e-8 * (1.0 + y.abs()));
        }
    }
}

#[test]
fn hurwitz_agrees_with_planted_root_signs() {
    let mut r = rng(205);
    let mut disagreements = 0;
    for _ in 0..1000 {
        let degree = r.gen_range(1..=5);
        let roots = oracle::planted_roots(&mut r, degree);
        let truth = verdict_from_max_real(roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max));
        if truth == Verdict::Inconclusive {
            continue;
        }
        let h = routh_hurwitz(&Polynomial::new(oracle::expand_roots(&roots)).unwrap()).unwrap();
        if h.verdict != truth {
            disagreements += 1;
        }
    }
    assert_eq!(disagreements, 0);
}

#[test]
fn hurwitz_is_scale_invariant() {
    let mut r = rng(206);
    for _ in 0..200 {
        let roots = oracle::planted_roots(&mut r, 4);
        let c = oracle::expand_roots(&roots);
        let a = routh_hurwitz(&Polynomial::new(c.clone()).unwrap()).unwrap().verdict;
        let scaled: Vec<f64> = c.iter().map(|v| -37.5 * v).collect();
        let b = routh_hurwitz(&Polynomial::new(scaled).unwrap()).unwrap().verdict;
        assert_eq!(a, b);
    }
}
