use super::matrix::solve;
use crate::error::{ModelError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Stop once `‖F(x)‖∞` falls below this.
    pub tol: f64,
    pub max_iterations: usize,
    /// Smallest damping factor tried in the halving line search.
    pub min_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iterations: 100, min_step: 2f64.powi(-20) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
}

/// Damped Newton iteration for `F(x) = 0`.
///
/// Each step is halved until `‖F‖∞` decreases; failure to decrease at
/// `min_step` ends the iteration with [`ModelError::NewtonNotConverged`].
/// Evaluation errors at a trial point count as "no decrease".
pub fn newton_solve<F, J>(f: F, jac: J, x0: &[f64], opts: &NewtonOptions) -> Result<NewtonOutcome>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
    J: Fn(&[f64]) -> Result<Vec<Vec<f64>>>,
{
    let mut x = x0.to_vec();
    let mut fx = f(&x)?;
    let mut res = inf_norm(&fx);
    if !res.is_finite() {
        return Err(ModelError::NonFinite { what: "Newton residual".into() });
    }
    let mut iterations = 0;
    while res >= opts.tol {
        if iterations == opts.max_iterations {
            return Err(ModelError::NewtonNotConverged { x, residual: res, iterations });
        }
        iterations += 1;
        let jx = jac(&x)?;
        let neg: Vec<f64> = fx.iter().map(|v| -v).collect();
        let dx = solve(&jx, &neg)?;

        let mut alpha = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + alpha * d).collect();
            if let Ok(ft) = f(&trial) {
                let rt = inf_norm(&ft);
                if rt.is_finite() && rt < res {
                    x = trial;
                    fx = ft;
                    res = rt;
                    break;
                }
            }
            alpha *= 0.5;
            if alpha < opts.min_step {
                return Err(ModelError::NewtonNotConverged { x, residual: res, iterations });
            }
        }
    }
    Ok(NewtonOutcome { x, residual: res, iterations })
}
