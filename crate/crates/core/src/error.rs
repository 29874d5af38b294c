use thiserror::Error;

/// Errors raised by model evaluation and the numerical routines built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("non-finite value in {what}")]
    NonFinite { what: String },

    #[error("singular denominator {term} = {value:e}")]
    SingularDenominator { term: &'static str, value: f64 },

    #[error("invalid parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("polynomial root iteration did not converge after {iterations} iterations (worst residual {worst_residual:e})")]
    RootsNotConverged {
        iterations: usize,
        worst_residual: f64,
        best: Vec<num_complex::Complex64>,
    },

    #[error("Newton iteration did not converge (residual {residual:e} after {iterations} iterations)")]
    NewtonNotConverged {
        x: Vec<f64>,
        residual: f64,
        iterations: usize,
    },

    #[error("singular linear system in Newton step")]
    SingularJacobian,

    #[error("positivity violated: {component} = {value:e} at t = {t}")]
    PositivityViolation {
        component: &'static str,
        value: f64,
        t: f64,
    },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("non-finite derivative at t = {t}")]
    NonFiniteDerivative { t: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
