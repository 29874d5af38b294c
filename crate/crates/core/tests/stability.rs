mod oracle;

use erbc_core::equilibria::{find_all, Family};
use erbc_core::numerics::Verdict;
use erbc_core::sampling::{random_params, rng, Regime};
use erbc_core::stability::{departure_check, empirical_check, ProbeOptions};
use erbc_core::{classify, jacobian, ModelParams};
use num_complex::Complex64;

#[test]
fn spectrum_contains_theta_and_block_union() {
    let mut r = rng(501);
    for j in 0..100 {
        let p = random_params(&mut r, if j % 2 == 0 { Regime::TumorFreeAdmissible } else { Regime::Generic });
        for eq in find_all(&p).unwrap().equilibria {
            let rep = classify(&eq, &p).unwrap();
            let theta = Complex64::new(-p.theta, 0.0);
            assert!(rep.eigenvalues.roots.iter().any(|z| (z - theta).norm() < 1e-8));
            if eq.point.t == 0.0 {
                let a = jacobian(&eq.point, &p).unwrap();
                let mut want = Vec::new();
                want.extend(oracle::eig2(a[0][0], a[0][1], a[1][0], a[1][1]));
                want.extend(oracle::eig2(a[2][2], a[2][4], a[4][2], a[4][4]));
                want.push(theta);
                assert!(oracle::same_multiset(&rep.eigenvalues.roots, &want, 1e-8), "{:?} vs {want:?}", rep.eigenvalues.roots);
            }
        }
    }
}

#[test]
fn hurwitz_and_eigenvalues_agree_off_the_margin() {
    let mut r = rng(502);
    let mut compared = 0;
    for j in 0..200 {
        let p = random_params(&mut r, if j % 4 == 0 { Regime::TumorFreeAdmissible } else { Regime::Generic });
        for eq in find_all(&p).unwrap().equilibria {
            let rep = classify(&eq, &p).unwrap();
            if rep.verdict != Verdict::Inconclusive {
                compared += 1;
                assert_eq!(rep.hurwitz.verdict, rep.verdict, "{:?}", rep.eigenvalues.roots);
            }
        }
    }
    assert!(compared > 300);
}

#[test]
fn block_derived_conditions_predict_the_verdict() {
    let mut r = rng(503);
    for j in 0..200 {
        let p = random_params(&mut r, if j % 2 == 0 { Regime::TumorFreeAdmissible } else { Regime::Generic });
        for eq in find_all(&p).unwrap().equilibria {
            let rep = classify(&eq, &p).unwrap();
            if rep.verdict != Verdict::Inconclusive {
                assert_eq!(rep.agreement.derived, Some(true), "{:?} {:?}", eq.family, rep.derived_checks);
            }
        }
    }
}

#[test]
fn dead_type1_is_always_unstable() {
    let mut r = rng(504);
    for _ in 0..100 {
        let p = random_params(&mut r, Regime::Generic);
        for eq in find_all(&p).unwrap().of_family(Family::Dead1) {
            assert_eq!(classify(eq, &p).unwrap().verdict, Verdict::Unstable);
        }
    }
}

#[test]
fn perturbations_confirm_the_linear_verdict() {
    let mut r = rng(505);
    let (mut stable, mut unstable) = (0, 0);
    let opts = ProbeOptions { directions: 4, ..Default::default() };
    for j in 0..60 {
        let p = random_params(&mut r, if j % 3 == 0 { Regime::TumorFreeAdmissible } else { Regime::Generic });
        for eq in find_all(&p).unwrap().equilibria {
            let rep = classify(&eq, &p).unwrap();
            match rep.verdict {
                Verdict::Stable if stable < 6 && rep.max_real < -1e-2 => {
                    assert!(empirical_check(&rep, &p, &opts).unwrap().confirmed);
                    stable += 1;
                }
                Verdict::Unstable if unstable < 3 => {
                    assert!(departure_check(&rep, &p, &opts).unwrap().confirmed);
                    unstable += 1;
                }
                _ => {}
            }
        }
    }
    assert_eq!((stable, unstable), (6, 3));
}

#[test]
fn decoupled_drug_gives_zero_immune_ratio() {
    let mut r = rng(506);
    for _ in 0..20 {
        let p = ModelParams { chi: 0.0, ..random_params(&mut r, Regime::Generic) };
        for eq in find_all(&p).unwrap().of_family(Family::Dead1) {
            let rep = classify(eq, &p).unwrap();
            assert_eq!(rep.repro.unwrap().r_im.unwrap().value, Some(0.0));
        }
    }
}
