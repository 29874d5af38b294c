//! Adaptive time integration of the model.

mod dopri;
mod settle;

pub use dopri::{integrate, IntegrationConfig, Trajectory};
pub use settle::{default_settle_horizon, settle, settle_with, SettleOutcome, MAX_SETTLE_HORIZON};

use crate::model::ModelParams;

/// Exact estrogen level `E* + (E(0) − E*)·e^(−θ(t − t0))`.
pub fn estrogen_closed_form(e0: f64, p: &ModelParams, t: f64, t0: f64) -> f64 {
    let star = p.estrogen_star();
    star + (e0 - star) * (-p.theta * (t - t0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SystemState;

    #[test]
    fn sourceless_origin_stays_zero() {
        let p = ModelParams { s: 0.0, p: 0.0, v_m: 0.0, ..Default::default() };
        let traj = integrate(&SystemState::zero(), &p, &IntegrationConfig::new(0.0, 50.0)).unwrap();
        assert!(traj.states.iter().all(|s| *s == SystemState::zero()));
        assert_eq!(traj.times.len(), 101);
    }

    #[test]
    fn estrogen_relaxes_in_closed_form() {
        let p = ModelParams::default();
        let x0 = SystemState::new(0.5, 0.1, 0.4, 2.0, 0.05);
        let t_end = 10.0 / p.theta;
        let traj = integrate(&x0, &p, &IntegrationConfig::new(0.0, t_end)).unwrap();
        let e = traj.last().e;
        let exact = estrogen_closed_form(2.0, &p, t_end, 0.0);
        assert!((e - exact).abs() <= 1e-6 * exact.abs());
    }

    #[test]
    fn samples_are_equidistant_and_hit_endpoints() {
        let p = ModelParams::default();
        let x0 = SystemState::new(0.5, 0.1, 0.4, 0.3, 0.05);
        let cfg = IntegrationConfig::new(2.0, 12.0).with_samples(11);
        let traj = integrate(&x0, &p, &cfg).unwrap();
        assert_eq!(traj.times.len(), 11);
        assert_eq!(traj.times[0], 2.0);
        assert_eq!(*traj.times.last().unwrap(), 12.0);
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
        assert!((traj.times[3] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_config_and_negative_start() {
        let p = ModelParams::default();
        let x0 = SystemState::new(0.5, 0.1, 0.4, 0.3, 0.05);
        assert!(integrate(&x0, &p, &IntegrationConfig::new(1.0, 1.0)).is_err());
        let neg = SystemState { t: -0.1, ..x0 };
        assert!(integrate(&neg, &p, &IntegrationConfig::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn settle_requires_horizon_beyond_window() {
        let p = ModelParams::default();
        let err = settle(&SystemState::zero(), &p, 5.0, 10.0, 1e-6).unwrap_err();
        assert!(matches!(err, crate::error::ModelError::Precondition(_)));
    }

    #[test]
    fn estrogen_only_system_settles_to_closed_form() {
        let p = ModelParams {
            theta: 5.0,
            d1: 0.0,
            l1: 0.0,
            s: 0.0,
            r: 0.0,
            g2: 0.0,
            l3: 0.0,
            p_m: 0.0,
            v_m: 0.0,
            chi: 0.0,
            ..Default::default()
        };
        let base = IntegrationConfig::new(0.0, 1.0).with_tolerances(1e-10, 1e-13);
        let out = settle_with(&SystemState::new(0.0, 0.0, 0.0, 3.0, 0.0), &p, 50.0, 5.0, 1e-9, &base).unwrap();
        assert!(out.settled, "{out:?}");
        assert!((out.limit.e - p.estrogen_star()).abs() < 1e-9);
    }

    #[test]
    fn default_horizon_uses_slowest_rate() {
        let p = ModelParams { theta: 2.0, m: 0.5, m_d: 0.0, ..Default::default() };
        assert_eq!(default_settle_horizon(&p), 1000.0);
        let p = ModelParams { theta: 1e-5, ..Default::default() };
        assert_eq!(default_settle_horizon(&p), MAX_SETTLE_HORIZON);
    }
}
