//! Parameters, state, vector field, Jacobian and the named coefficient families.

mod coefficients;
mod field;
mod params;
pub mod state;

pub use coefficients::{
    coefficients, reproduction_numbers, CoefficientSet, CoefficientTag, Ratio, ReproductionNumbers,
    RATIO_GUARD,
};
pub use field::{jacobian, residual_norm, rhs, DENOMINATOR_GUARD};
pub use params::{ModelParams, PARAM_NAMES};
pub use state::{SystemState, COMPONENT_NAMES};

/// Free-function form of [`ModelParams::validate`].
pub fn validate_params(p: &ModelParams) -> Vec<String> {
    p.validate()
}
