//! Dormand–Prince 5(4) with PI step control and the standard 4th-order
//! continuous extension for equidistant output.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::model::{rhs, ModelParams, SystemState, COMPONENT_NAMES};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

type Vec5 = [f64; 5];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationConfig {
    pub t0: f64,
    pub t_end: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    /// Upper bound on the step; `None` means `t_end − t0`.
    #[serde(default)]
    pub max_step: Option<f64>,
    /// First trial step; `None` selects one automatically.
    #[serde(default)]
    pub initial_step: Option<f64>,
    #[serde(default = "default_floor")]
    pub negativity_floor: f64,
    /// Number of equidistant output samples, including both endpoints.
    #[serde(skip, default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn default_rel_tol() -> f64 {
    1e-8
}
fn default_abs_tol() -> f64 {
    1e-10
}
fn default_floor() -> f64 {
    -1e-9
}
fn default_samples() -> usize {
    101
}
fn default_max_steps() -> usize {
    5_000_000
}

impl IntegrationConfig {
    pub fn new(t0: f64, t_end: f64) -> Self {
        Self {
            t0,
            t_end,
            rel_tol: default_rel_tol(),
            abs_tol: default_abs_tol(),
            max_step: None,
            initial_step: None,
            negativity_floor: default_floor(),
            samples: default_samples(),
            max_steps: default_max_steps(),
        }
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(ModelError::InvalidInput(msg.to_string()));
        if !(self.t0.is_finite() && self.t_end.is_finite()) || self.t_end <= self.t0 {
            return bad("t_end must exceed t0");
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.negativity_floor <= 0.0) {
            return bad("negativity_floor must be <= 0");
        }
        if self.samples < 2 {
            return bad("at least two samples are required");
        }
        if self.max_step.is_some_and(|h| !(h > 0.0)) || self.initial_step.is_some_and(|h| !(h > 0.0)) {
            return bad("step bounds must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SystemState>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Most negative value reached by each component (0 when none went negative).
    pub positivity_violations: [f64; 5],
    /// Local error estimate (weighted RMS) of the final accepted step.
    pub last_error_estimate: f64,
}

impl Trajectory {
    pub fn last(&self) -> &SystemState {
        self.states.last().expect("non-empty trajectory")
    }
}

fn eval(x: &Vec5, p: &ModelParams, t: f64) -> Result<Vec5> {
    let f = rhs(&SystemState::from_array(*x), p)?;
    if f.iter().any(|v| !v.is_finite()) {
        return Err(ModelError::NonFiniteDerivative { t });
    }
    Ok(f)
}

fn axpy(y: &Vec5, h: f64, terms: &[(f64, &Vec5)]) -> Vec5 {
    let mut out = *y;
    for i in 0..5 {
        let s: f64 = terms.iter().map(|(c, k)| c * k[i]).sum();
        out[i] += h * s;
    }
    out
}

fn error_norm(err: &Vec5, y0: &Vec5, y1: &Vec5, cfg: &IntegrationConfig) -> f64 {
    let s: f64 = (0..5)
        .map(|i| {
            let sc = cfg.abs_tol + cfg.rel_tol * y0[i].abs().max(y1[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (s / 5.0).sqrt()
}

fn initial_step(y0: &Vec5, f0: &Vec5, p: &ModelParams, cfg: &IntegrationConfig, hmax: f64) -> Result<f64> {
    let sc: Vec<f64> = y0.iter().map(|y| cfg.abs_tol + cfg.rel_tol * y.abs()).collect();
    let d0 = (y0.iter().zip(&sc).map(|(y, s)| (y / s).powi(2)).sum::<f64>() / 5.0).sqrt();
    let d1 = (f0.iter().zip(&sc).map(|(f, s)| (f / s).powi(2)).sum::<f64>() / 5.0).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(hmax);
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let f1 = eval(&y1, p, cfg.t0 + h0)?;
    let d2 = ((0..5).map(|i| ((f1[i] - f0[i]) / sc[i]).powi(2)).sum::<f64>() / 5.0).sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    Ok((100.0 * h0).min(h1).min(hmax))
}

struct Dense {
    t0: f64,
    h: f64,
    r: [Vec5; 5],
}

impl Dense {
    fn at(&self, t: f64) -> Vec5 {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let mut out = [0.0; 5];
        for i in 0..5 {
            out[i] = self.r[0][i]
                + th * (self.r[1][i] + th1 * (self.r[2][i] + th * (self.r[3][i] + th1 * self.r[4][i])));
        }
        out
    }
}

/// Integrates the model from `x0` over `[cfg.t0, cfg.t_end]`.
///
/// Any accepted state or output sample below `cfg.negativity_floor` aborts with
/// [`ModelError::PositivityViolation`]; samples in `[floor, 0)` are reported as 0.
pub fn integrate(x0: &SystemState, p: &ModelParams, cfg: &IntegrationConfig) -> Result<Trajectory> {
    cfg.validate()?;
    p.ensure_valid()?;
    x0.ensure_finite()?;
    if !x0.is_nonnegative() {
        return Err(ModelError::Precondition("initial state must be componentwise >= 0".into()));
    }

    let span = cfg.t_end - cfg.t0;
    let hmax = cfg.max_step.unwrap_or(span).min(span);
    let h_underflow = 1e-14 * span;
    let sample_times: Vec<f64> = (0..cfg.samples)
        .map(|i| {
            if i + 1 == cfg.samples {
                cfg.t_end
            } else {
                cfg.t0 + span * i as f64 / (cfg.samples - 1) as f64
            }
        })
        .collect();

    let mut worst = [0.0_f64; 5];
    let record = |x: &Vec5, t: f64, worst: &mut [f64; 5]| -> Result<SystemState> {
        let mut out = *x;
        for i in 0..5 {
            if out[i] < 0.0 {
                worst[i] = worst[i].min(out[i]);
                if out[i] < cfg.negativity_floor {
                    return Err(ModelError::PositivityViolation { component: COMPONENT_NAMES[i], value: out[i], t });
                }
                out[i] = 0.0;
            }
        }
        Ok(SystemState::from_array(out))
    };

    let mut t = cfg.t0;
    let mut y = x0.to_array();
    let mut k1 = eval(&y, p, t)?;
    let mut h = match cfg.initial_step {
        Some(h) => h.min(hmax),
        None => initial_step(&y, &k1, p, cfg, hmax)?,
    };

    let mut times = Vec::with_capacity(cfg.samples);
    let mut states = Vec::with_capacity(cfg.samples);
    times.push(sample_times[0]);
    states.push(record(&y, t, &mut worst)?);
    let mut next_sample = 1;

    let mut accepted = 0;
    let mut rejected = 0;
    let mut fac_old = 1e-4_f64;
    let mut last_reject = false;
    let mut last_err = 0.0;

    while next_sample < sample_times.len() {
        if accepted + rejected >= cfg.max_steps {
            return Err(ModelError::StepUnderflow { t, h });
        }
        let finishing = t + 1.01 * h >= cfg.t_end;
        if finishing {
            h = cfg.t_end - t;
        }
        if h < h_underflow {
            return Err(ModelError::StepUnderflow { t, h });
        }

        let y2 = axpy(&y, h, &[(A21, &k1)]);
        let k2 = eval(&y2, p, t + C2 * h)?;
        let y3 = axpy(&y, h, &[(A31, &k1), (A32, &k2)]);
        let k3 = eval(&y3, p, t + C3 * h)?;
        let y4 = axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        let k4 = eval(&y4, p, t + C4 * h)?;
        let y5 = axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        let k5 = eval(&y5, p, t + C5 * h)?;
        let y6 = axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        let k6 = eval(&y6, p, t + h)?;
        let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let t_new = if finishing { cfg.t_end } else { t + h };
        let k7 = eval(&y_new, p, t_new)?;

        let mut err = [0.0; 5];
        for i in 0..5 {
            err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let err_norm = error_norm(&err, &y, &y_new, cfg);

        let fac11 = err_norm.powf(0.2 - BETA * 0.75);
        if err_norm <= 1.0 {
            let dense = Dense {
                t0: t,
                h,
                r: {
                    let ydiff: Vec5 = std::array::from_fn(|i| y_new[i] - y[i]);
                    let bspl: Vec5 = std::array::from_fn(|i| h * k1[i] - ydiff[i]);
                    [
                        y,
                        ydiff,
                        bspl,
                        std::array::from_fn(|i| ydiff[i] - h * k7[i] - bspl[i]),
                        std::array::from_fn(|i| {
                            h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
                        }),
                    ]
                },
            };
            let mut pending = Vec::new();
            let mut j = next_sample;
            while j < sample_times.len() && sample_times[j] <= t_new {
                let ts = sample_times[j];
                let xs = if j + 1 == sample_times.len() && finishing { y_new } else { dense.at(ts) };
                pending.push((ts, xs));
                j += 1;
            }
            // A step that leaves the orthant by more than the floor, at its end or at
            // an output sample, is retried shorter.
            let dips = std::iter::once(&y_new)
                .chain(pending.iter().map(|(_, x)| x))
                .any(|x| x.iter().any(|v| *v < cfg.negativity_floor));
            if dips && h > 1e3 * h_underflow {
                rejected += 1;
                last_reject = true;
                h *= 0.5;
                continue;
            }

            accepted += 1;
            last_err = err_norm;
            let fac = (fac11 / fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = (h / fac).min(hmax);
            if last_reject {
                h_new = h_new.min(h);
            }
            fac_old = err_norm.max(1e-4);
            last_reject = false;

            for (ts, xs) in pending {
                times.push(ts);
                states.push(record(&xs, ts, &mut worst)?);
                next_sample += 1;
            }
            record(&y_new, t_new, &mut worst)?;

            y = y_new;
            k1 = k7;
            t = t_new;
            h = h_new;
        } else {
            rejected += 1;
            last_reject = true;
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
        }
    }

    Ok(Trajectory {
        times,
        states,
        accepted_steps: accepted,
        rejected_steps: rejected,
        positivity_violations: worst,
        last_error_estimate: last_err,
    })
}
