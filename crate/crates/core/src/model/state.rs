use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

pub const N: usize = 0;
pub const T: usize = 1;
pub const I: usize = 2;
pub const E: usize = 3;
pub const M: usize = 4;

pub const COMPONENT_NAMES: [&str; 5] = ["N", "T", "I", "E", "M"];

/// Cell populations and concentrations `(N, T, I, E, M)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemState {
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "M")]
    pub m: f64,
}

impl SystemState {
    pub const fn new(n: f64, t: f64, i: f64, e: f64, m: f64) -> Self {
        Self { n, t, i, e, m }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0, 0.0)
    }

    pub const fn from_array(x: [f64; 5]) -> Self {
        Self::new(x[0], x[1], x[2], x[3], x[4])
    }

    pub const fn to_array(self) -> [f64; 5] {
        [self.n, self.t, self.i, self.e, self.m]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn ensure_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(ModelError::NonFinite { what: "state".into() })
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.to_array().iter().all(|&v| v >= 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    /// `‖a − b‖∞ / (1 + ‖b‖∞)`.
    pub fn scaled_distance(&self, other: &Self) -> f64 {
        let a = self.to_array();
        let b = other.to_array();
        let diff = a.iter().zip(&b).fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()));
        diff / (1.0 + other.max_abs())
    }
}

impl From<[f64; 5]> for SystemState {
    fn from(x: [f64; 5]) -> Self {
        Self::from_array(x)
    }
}

impl From<SystemState> for [f64; 5] {
    fn from(s: SystemState) -> Self {
        s.to_array()
    }
}
