//! The vector field of the model and its analytic Jacobian.
//!
//! ```text
//! dN/dt = N(a1 − b1 N) − d1 T N/(1 + εT) − l1 N E (1−k)
//! dT/dt = T(a2 d − b2 T) − g1 I T − m_d T + l1 N E (1−k)
//! dI/dt = s + r I T/(o + T) − g2 I T − m I − l3 I E (1−k)/(g + E) + p_M I M/(j_M + M)
//! dE/dt = p(1−k) − θ E
//! dM/dt = v_M − n_M M + χ M I/(ξ + I)
//! ```

use super::params::ModelParams;
use super::state::SystemState;
use crate::error::{ModelError, Result};
use crate::numerics::Matrix5;

/// Magnitude below which a saturating denominator is treated as singular.
pub const DENOMINATOR_GUARD: f64 = 1e-12;

pub(crate) fn guard(term: &'static str, value: f64) -> Result<f64> {
    if value.abs() < DENOMINATOR_GUARD || !value.is_finite() {
        Err(ModelError::SingularDenominator { term, value })
    } else {
        Ok(value)
    }
}

/// The five saturating denominators, checked once per evaluation.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Denominators {
    pub sat: f64,
    pub immune: f64,
    pub estrogen: f64,
    pub drug: f64,
    pub production: f64,
}

impl Denominators {
    pub fn at(x: &SystemState, p: &ModelParams) -> Result<Self> {
        Ok(Self {
            sat: guard("1+epsilon*T", 1.0 + p.epsilon * x.t)?,
            immune: guard("o+T", p.o + x.t)?,
            estrogen: guard("g+E", p.g + x.e)?,
            drug: guard("j_M+M", p.j_m + x.m)?,
            production: guard("xi+I", p.xi + x.i)?,
        })
    }
}

fn check_inputs(x: &SystemState, p: &ModelParams) -> Result<()> {
    x.ensure_finite()?;
    if p.values().iter().any(|v| !v.is_finite()) {
        return Err(ModelError::NonFinite { what: "parameters".into() });
    }
    Ok(())
}

/// Time derivative `(dN, dT, dI, dE, dM)` at `x`.
pub fn rhs(x: &SystemState, p: &ModelParams) -> Result<[f64; 5]> {
    check_inputs(x, p)?;
    let den = Denominators::at(x, p)?;
    let u = p.unblocked();
    let SystemState { n, t, i, e, m } = *x;

    let transform = p.l1 * n * e * u;
    let dn = n * (p.a1 - p.b1 * n) - p.d1 * t * n / den.sat - transform;
    let dt = t * (p.a2 * p.d - p.b2 * t) - p.g1 * i * t - p.m_d * t + transform;
    let di = p.s + p.r * i * t / den.immune - p.g2 * i * t - p.m * i - p.l3 * i * e * u / den.estrogen
        + p.p_m * i * m / den.drug;
    let de = p.p * u - p.theta * e;
    let dm = p.v_m - p.n_m * m + p.chi * m * i / den.production;
    Ok([dn, dt, di, de, dm])
}

/// `‖rhs(x)‖∞`.
pub fn residual_norm(x: &SystemState, p: &ModelParams) -> Result<f64> {
    Ok(rhs(x, p)?.iter().fold(0.0_f64, |a, v| a.max(v.abs())))
}

/// Analytic Jacobian, entry `(i, j) = ∂ rhs_i / ∂ x_j`, rows and columns in `(N, T, I, E, M)` order.
pub fn jacobian(x: &SystemState, p: &ModelParams) -> Result<Matrix5> {
    check_inputs(x, p)?;
    let den = Denominators::at(x, p)?;
    let u = p.unblocked();
    let SystemState { n, t, i, e, m } = *x;
    let mut j = [[0.0; 5]; 5];

    j[0][0] = p.a1 - 2.0 * p.b1 * n - p.d1 * t / den.sat - p.l1 * e * u;
    j[0][1] = -p.d1 * n / (den.sat * den.sat);
    j[0][3] = -p.l1 * n * u;

    j[1][0] = p.l1 * e * u;
    j[1][1] = p.a2 * p.d - 2.0 * p.b2 * t - p.g1 * i - p.m_d;
    j[1][2] = -p.g1 * t;
    j[1][3] = p.l1 * n * u;

    j[2][1] = p.r * i * p.o / (den.immune * den.immune) - p.g2 * i;
    j[2][2] = p.r * t / den.immune - p.g2 * t - p.m - p.l3 * e * u / den.estrogen + p.p_m * m / den.drug;
    j[2][3] = -p.l3 * i * p.g * u / (den.estrogen * den.estrogen);
    j[2][4] = p.p_m * i * p.j_m / (den.drug * den.drug);

    j[3][3] = -p.theta;

    j[4][2] = p.chi * m * p.xi / (den.production * den.production);
    j[4][4] = -p.n_m + p.chi * i / den.production;
    Ok(j)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_gives_sources_only() {
        let p = ModelParams::default();
        let f = rhs(&SystemState::zero(), &p).unwrap();
        assert_eq!(f, [0.0, 0.0, p.s, p.p * (1.0 - p.k), p.v_m]);
    }

    #[test]
    fn estrogen_balance() {
        let p = ModelParams { p: 2.0, k: 0.5, theta: 0.5, ..Default::default() };
        let x = SystemState { e: 2.0, ..SystemState::zero() };
        assert_eq!(rhs(&x, &p).unwrap()[3], 0.0);
    }

    #[test]
    fn estrogen_row_is_decoupled() {
        let p = ModelParams::default();
        let x = SystemState::new(0.7, 0.2, 1.1, 0.3, 0.4);
        let j = jacobian(&x, &p).unwrap();
        assert_eq!(j[3], [0.0, 0.0, 0.0, -p.theta, 0.0]);
    }

    #[test]
    fn saturated_incidence_derivative_at_zero_tumor() {
        let p = ModelParams::default();
        let x = SystemState::new(0.9, 0.0, 1.0, 0.3, 0.2);
        let j = jacobian(&x, &p).unwrap();
        assert_eq!(j[0][1], -p.d1 * x.n);
    }

    #[test]
    fn non_finite_state_is_domain_error() {
        let p = ModelParams::default();
        let x = SystemState { i: f64::NAN, ..SystemState::zero() };
        assert!(matches!(rhs(&x, &p), Err(ModelError::NonFinite { .. })));
        assert!(matches!(jacobian(&x, &p), Err(ModelError::NonFinite { .. })));
    }

    #[test]
    fn singular_denominator_names_term() {
        let p = ModelParams::default();
        let x = SystemState { i: -p.xi, ..SystemState::zero() };
        match jacobian(&x, &p) {
            Err(ModelError::SingularDenominator { term, .. }) => assert_eq!(term, "xi+I"),
            other => panic!("unexpected {other:?}"),
        }
        let x = SystemState { t: -p.o, ..SystemState::zero() };
        match rhs(&x, &p) {
            Err(ModelError::SingularDenominator { term, .. }) => assert_eq!(term, "o+T"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
