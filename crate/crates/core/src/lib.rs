//! Five-compartment model of ER-positive breast cancer under ketogenic diet,
//! endocrine therapy and immunotherapy.
//!
//! The crate covers the vector field and its Jacobian ([`model`]), small
//! dense numerics ([`numerics`]), adaptive integration ([`integrator`]),
//! the equilibrium families ([`equilibria`]), local stability
//! ([`stability`]), and the batch layer used by the CLI (scenarios, sweeps,
//! bifurcation localization, the validation suite and file export).

pub mod bifurcation;
pub mod conditions;
pub mod equilibria;
pub mod error;
pub mod export;
pub mod integrator;
pub mod model;
pub mod numerics;
pub mod sampling;
pub mod scenario;
pub mod stability;
pub mod sweep;
pub mod validation;

pub use error::{ModelError, Result};
pub use integrator::{integrate, IntegrationConfig, Trajectory};
pub use model::{jacobian, rhs, ModelParams, SystemState};
pub use conditions::Condition;
pub use equilibria::{find_all, Catalog, Equilibrium, Family};
pub use stability::{classify, StabilityReport};
