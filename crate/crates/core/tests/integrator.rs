mod oracle;

use erbc_core::integrator::estrogen_closed_form;
use erbc_core::sampling::{random_params, random_state, rng, Regime};
use erbc_core::{integrate, rhs, IntegrationConfig, SystemState};
use rand::Rng;

#[test]
fn agrees_with_fine_rk4() {
    let mut r = rng(301);
    for _ in 0..20 {
        let p = random_params(&mut r, Regime::Generic);
        let x0 = random_state(&mut r, 2.0, 0.0);
        let t_end = 10.0;
        let f = |y: &[f64; 5]| rhs(&SystemState::from_array(*y), &p).unwrap();
        let coarse = oracle::rk4(f, x0.to_array(), t_end, 2000);
        let fine = oracle::rk4(f, x0.to_array(), t_end, 4000);
        // RK4 self-convergence: halving the step shrinks the error 16-fold.
        let rk_err = (0..5).map(|k| (coarse[k] - fine[k]).abs()).fold(0.0, f64::max) / 15.0;
        assert!(rk_err < 1e-9);
        let cfg = IntegrationConfig::new(0.0, t_end).with_tolerances(1e-11, 1e-13).with_samples(2);
        let got = integrate(&x0, &p, &cfg).unwrap();
        let end = got.last().to_array();
        for k in 0..5 {
            assert!((end[k] - fine[k]).abs() < 1e-7 * (1.0 + fine[k].abs()), "{k}: {} vs {}", end[k], fine[k]);
        }
    }
}

#[test]
fn estrogen_follows_closed_form() {
    let mut r = rng(302);
    for _ in 0..100 {
        let p = random_params(&mut r, Regime::Generic);
        let x0 = random_state(&mut r, 3.0, 0.1);
        let t_end = r.gen_range(5.0..50.0);
        let cfg = IntegrationConfig::new(0.0, t_end).with_samples(50);
        let traj = integrate(&x0, &p, &cfg).unwrap();
        for (t, x) in traj.times.iter().zip(&traj.states) {
            let star = p.p * (1.0 - p.k) / p.theta;
            let exact = star + (x0.e - star) * (-p.theta * t).exp();
            assert!((x.e - exact).abs() <= 1e-6 * exact.abs());
            assert!((estrogen_closed_form(x0.e, &p, *t, 0.0) - exact).abs() <= 1e-15 * exact.abs().max(1.0));
        }
    }
}

#[test]
fn trajectories_stay_nonnegative() {
    let mut r = rng(303);
    for _ in 0..200 {
        let p = random_params(&mut r, Regime::Generic);
        let x0 = random_state(&mut r, 3.0, 0.3);
        let traj = integrate(&x0, &p, &IntegrationConfig::new(0.0, 100.0)).unwrap();
        for x in &traj.states {
            assert!(x.to_array().iter().all(|v| *v >= -1e-9));
        }
    }
}

#[test]
fn output_is_deterministic() {
    let p = random_params(&mut rng(304), Regime::Generic);
    let x0 = SystemState::new(0.4, 0.2, 0.3, 0.1, 0.05);
    let cfg = IntegrationConfig::new(0.0, 30.0).with_samples(31);
    assert_eq!(integrate(&x0, &p, &cfg).unwrap(), integrate(&x0, &p, &cfg).unwrap());
}
