use serde::{Deserialize, Serialize};

use super::dopri::{integrate, IntegrationConfig};
use crate::error::{ModelError, Result};
use crate::model::{ModelParams, SystemState};

pub const MAX_SETTLE_HORIZON: f64 = 1e6;
const WINDOW_SAMPLES: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettleOutcome {
    pub settled: bool,
    /// State at the horizon.
    pub limit: SystemState,
    /// Largest scaled deviation from `limit` over the final window.
    pub window_variation: f64,
}

/// `500 / min(θ, m, m_d)` over the strictly positive rates, capped at [`MAX_SETTLE_HORIZON`].
pub fn default_settle_horizon(p: &ModelParams) -> f64 {
    let slowest = [p.theta, p.m, p.m_d].into_iter().filter(|&r| r > 0.0).fold(f64::INFINITY, f64::min);
    (500.0 / slowest).min(MAX_SETTLE_HORIZON)
}

/// Integrates to `horizon` and reports whether the final `window` is flat to `eps`.
pub fn settle(x0: &SystemState, p: &ModelParams, horizon: f64, window: f64, eps: f64) -> Result<SettleOutcome> {
    settle_with(x0, p, horizon, window, eps, &IntegrationConfig::new(0.0, horizon))
}

/// [`settle`] with tolerances and step bounds taken from `base`; its time span is ignored.
pub fn settle_with(
    x0: &SystemState,
    p: &ModelParams,
    horizon: f64,
    window: f64,
    eps: f64,
    base: &IntegrationConfig,
) -> Result<SettleOutcome> {
    if !(window > 0.0 && horizon > window) {
        return Err(ModelError::Precondition(format!(
            "settle requires horizon > window > 0 (horizon {horizon}, window {window})"
        )));
    }
    let approach_end = horizon - window;
    let start = if approach_end > 0.0 {
        let cfg = IntegrationConfig { t0: 0.0, t_end: approach_end, samples: 2, ..*base };
        *integrate(x0, p, &cfg)?.last()
    } else {
        *x0
    };
    let cfg = IntegrationConfig { t0: approach_end, t_end: horizon, samples: WINDOW_SAMPLES, ..*base };
    let tail = integrate(&start, p, &cfg)?;
    let limit = *tail.last();
    let variation = tail.states.iter().map(|s| s.scaled_distance(&limit)).fold(0.0, f64::max);
    Ok(SettleOutcome { settled: variation < eps, limit, window_variation: variation })
}
