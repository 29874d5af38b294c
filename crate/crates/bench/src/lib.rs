//! Shared fixtures for the criterion benches.

use erbc_core::{ModelParams, SystemState};

/// A state away from every equilibrium family, so no term vanishes.
pub fn interior_state() -> SystemState {
    SystemState::new(0.8, 0.3, 1.1, 0.35, 0.2)
}

pub fn params() -> ModelParams {
    ModelParams::default()
}
