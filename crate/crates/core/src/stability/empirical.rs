use rand::Rng;
use serde::{Deserialize, Serialize};

use super::StabilityReport;
use crate::error::{ModelError, Result};
use crate::integrator::{integrate, IntegrationConfig};
use crate::model::{ModelParams, SystemState};
use crate::numerics::Verdict;
use crate::sampling;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeOptions {
    pub directions: usize,
    /// Perturbation size relative to `1 + ‖x‖∞`.
    pub magnitude: f64,
    /// Scaled distance a stable run must end within.
    pub return_tol: f64,
    /// Scaled distance an unstable run must exceed at some sample.
    pub departure_tol: f64,
    pub seed: u64,
    /// Integration time as a multiple of `1 / |max Re λ|`.
    pub rate_multiple: f64,
    pub max_horizon: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            directions: 10,
            magnitude: 1e-3,
            return_tol: 1e-4,
            departure_tol: 1e-2,
            seed: 0x5eed,
            rate_multiple: 25.0,
            max_horizon: 1e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationRun {
    pub start: SystemState,
    pub end: SystemState,
    /// Scaled distance from the equilibrium at the end of the run.
    pub final_distance: f64,
    /// Largest scaled distance over the sampled trajectory.
    pub max_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCheck {
    pub confirmed: bool,
    pub horizon: f64,
    pub runs: Vec<PerturbationRun>,
}

/// Perturbed starts around `x`, each within the nonnegative orthant.
pub fn perturbed_starts(x: &SystemState, opts: &ProbeOptions) -> Vec<SystemState> {
    let mut rng = sampling::rng(opts.seed);
    let step = opts.magnitude * (1.0 + x.max_abs());
    (0..opts.directions)
        .map(|_| {
            let mut d: [f64; 5] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
            let norm = d.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            for v in d.iter_mut() {
                *v /= norm;
            }
            let base = x.to_array();
            SystemState::from_array(std::array::from_fn(|k| (base[k] + step * d[k]).max(0.0)))
        })
        .collect()
}

fn probe_config(horizon: f64) -> IntegrationConfig {
    IntegrationConfig::new(0.0, horizon).with_tolerances(1e-9, 1e-13)
}

fn run(x: &SystemState, start: SystemState, p: &ModelParams, horizon: f64) -> Result<PerturbationRun> {
    let traj = integrate(&start, p, &probe_config(horizon))?;
    let max_distance = traj.states.iter().map(|s| s.scaled_distance(x)).fold(0.0, f64::max);
    let end = *traj.last();
    Ok(PerturbationRun { start, end, final_distance: end.scaled_distance(x), max_distance })
}

fn horizon_for(report: &StabilityReport, opts: &ProbeOptions) -> f64 {
    (opts.rate_multiple / report.max_real.abs()).clamp(1.0, opts.max_horizon)
}

/// Confirms a stable verdict by simulation: every perturbed start returns
/// within `return_tol` of the equilibrium.
pub fn empirical_check(report: &StabilityReport, p: &ModelParams, opts: &ProbeOptions) -> Result<EmpiricalCheck> {
    if report.verdict != Verdict::Stable {
        return Err(ModelError::Precondition(format!(
            "empirical check needs a stable equilibrium, got {}",
            report.verdict
        )));
    }
    let x = report.equilibrium.point;
    let horizon = horizon_for(report, opts);
    let runs = perturbed_starts(&x, opts)
        .into_iter()
        .map(|s| run(&x, s, p, horizon))
        .collect::<Result<Vec<_>>>()?;
    let confirmed = runs.iter().all(|r| r.final_distance < opts.return_tol);
    Ok(EmpiricalCheck { confirmed, horizon, runs })
}

/// Confirms an unstable verdict by simulation: some perturbed start leaves
/// the `departure_tol` neighbourhood.
pub fn departure_check(report: &StabilityReport, p: &ModelParams, opts: &ProbeOptions) -> Result<EmpiricalCheck> {
    if report.verdict != Verdict::Unstable {
        return Err(ModelError::Precondition(format!(
            "departure check needs an unstable equilibrium, got {}",
            report.verdict
        )));
    }
    let x = report.equilibrium.point;
    let horizon = horizon_for(report, opts);
    let runs = perturbed_starts(&x, opts)
        .into_iter()
        .map(|s| run(&x, s, p, horizon))
        .collect::<Result<Vec<_>>>()?;
    let confirmed = runs.iter().any(|r| r.max_distance > opts.departure_tol);
    Ok(EmpiricalCheck { confirmed, horizon, runs })
}
