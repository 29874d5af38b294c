//! Named coefficient families used by the stability conditions, and the
//! reproduction numbers built from them.
//!
//! The formulas are kept exactly as the model's stability analysis states
//! them, including places where they differ from the analytic Jacobian
//! (for example `A8` lacks the square on `g+E`, `C0` lacks the `(1−k)`
//! factor, and the Jacobian's `(N,T)` entry is `−A2`). Cross-checks in
//! [`crate::stability`] always go through [`super::jacobian`].

use serde::{Deserialize, Serialize};

use super::field::guard;
use super::params::ModelParams;
use super::state::SystemState;
use crate::error::Result;

/// Denominator magnitude below which a reproduction number is reported as undefined.
pub const RATIO_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoefficientTag {
    /// Tumor-free state, `A0..A10`.
    A,
    /// Dead state with `N = T = 0`, `B0..B8`.
    B,
    /// Dead state with `N = 0`, `T > 0`, `C0..C9`.
    C,
}

impl CoefficientTag {
    pub fn len(self) -> usize {
        match self {
            CoefficientTag::A => 11,
            CoefficientTag::B => 9,
            CoefficientTag::C => 10,
        }
    }

    fn intended_for(self, x: &SystemState) -> bool {
        match self {
            CoefficientTag::A => x.t == 0.0,
            CoefficientTag::B => x.n == 0.0 && x.t == 0.0,
            CoefficientTag::C => x.n == 0.0 && x.t > 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub tag: CoefficientTag,
    pub values: Vec<f64>,
    pub evaluated_at: SystemState,
    /// Set when the state is not of the family the tag was written for.
    pub off_family: bool,
}

impl CoefficientSet {
    pub fn get(&self, index: usize) -> f64 {
        self.values[index]
    }
}

impl std::ops::Index<usize> for CoefficientSet {
    type Output = f64;
    fn index(&self, index: usize) -> &f64 {
        &self.values[index]
    }
}

pub fn coefficients(x: &SystemState, p: &ModelParams, tag: CoefficientTag) -> Result<CoefficientSet> {
    x.ensure_finite()?;
    let u = p.unblocked();
    let SystemState { n, t, i, e, m } = *x;
    let ge = guard("g+E", p.g + e)?;
    let jm = guard("j_M+M", p.j_m + m)?;
    let xi = guard("xi+I", p.xi + i)?;
    let drug_activation = p.p_m * m / jm;
    let estrogen_suppression = p.l3 * e * u / ge;

    let values = match tag {
        CoefficientTag::A => {
            guard("o", p.o)?;
            vec![
                p.a1 - 2.0 * p.b1 * n - p.l1 * e * u,
                p.l1 * e * u,
                p.d1 * n,
                p.a2 * p.d - p.g1 * i - p.m_d,
                p.r * i / p.o - p.g2 * i,
                -p.m - estrogen_suppression + drug_activation,
                p.chi * m * p.xi / (xi * xi),
                p.l1 * n * u,
                p.l3 * i * p.g / ge * u,
                p.p_m * i * p.j_m / (jm * jm),
                -p.n_m + p.chi * i / xi,
            ]
        }
        CoefficientTag::B => {
            guard("o", p.o)?;
            vec![
                p.a1 - p.l1 * e * u,
                p.l1 * e * u,
                p.a2 * p.d - p.g1 * i - p.m_d,
                p.r * i / p.o - p.g2 * i,
                -p.m - estrogen_suppression + drug_activation,
                p.chi * m * p.xi / (xi * xi),
                -p.l3 * i * p.g / (ge * ge) * u,
                p.p_m * i * p.j_m / (jm * jm),
                -p.n_m + p.chi * i / xi,
            ]
        }
        CoefficientTag::C => {
            let sat = guard("1+epsilon*T", 1.0 + p.epsilon * t)?;
            let ot = guard("o+T", p.o + t)?;
            vec![
                p.a1 - p.d1 * t / sat - p.l1 * e,
                p.l1 * e * u,
                p.a2 * p.d - 2.0 * p.b2 * t - p.g1 * i - p.m_d,
                p.r * i * p.o / (ot * ot) - p.g2 * i,
                p.g1 * t,
                p.r * t / ot - p.g2 * t - p.m - estrogen_suppression + drug_activation,
                p.chi * m * p.xi / (xi * xi),
                -p.l3 * i * p.g / (ge * ge) * u,
                p.p_m * i * p.j_m / (jm * jm),
                -p.n_m + p.chi * i / xi,
            ]
        }
    };
    debug_assert_eq!(values.len(), tag.len());
    Ok(CoefficientSet { tag, values, evaluated_at: *x, off_family: !tag.intended_for(x) })
}

/// A ratio that is left undefined when its denominator is numerically zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub numerator: f64,
    pub denominator: f64,
    pub value: Option<f64>,
}

impl Ratio {
    pub fn new(numerator: f64, denominator: f64) -> Self {
        let value = (denominator.abs() >= RATIO_GUARD).then(|| numerator / denominator);
        Self { numerator, denominator, value }
    }

    pub fn is_defined(&self) -> bool {
        self.value.is_some()
    }

    /// `value < 1`, false when undefined.
    pub fn below_one(&self) -> bool {
        self.value.is_some_and(|v| v < 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReproductionNumbers {
    /// `A6·A9 / (A10·A5)`.
    pub r0: Ratio,
    /// `A1·A2 / (A0·A3)`.
    pub r1: Ratio,
    /// `B5·B7 / (B4·B8)`, only at states with `N = T = 0`.
    pub r_im: Option<Ratio>,
}

impl ReproductionNumbers {
    /// Names of the ratios whose denominators were too small to divide by.
    pub fn undefined(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.r0.is_defined() {
            out.push("R0");
        }
        if !self.r1.is_defined() {
            out.push("R1");
        }
        if self.r_im.is_some_and(|r| !r.is_defined()) {
            out.push("R_IM");
        }
        out
    }
}

pub fn reproduction_numbers(x: &SystemState, p: &ModelParams) -> Result<ReproductionNumbers> {
    let a = coefficients(x, p, CoefficientTag::A)?;
    let r0 = Ratio::new(a[6] * a[9], a[10] * a[5]);
    let r1 = Ratio::new(a[1] * a[2], a[0] * a[3]);
    let r_im = if x.n == 0.0 && x.t == 0.0 {
        let b = coefficients(x, p, CoefficientTag::B)?;
        Some(Ratio::new(b[5] * b[7], b[4] * b[8]))
    } else {
        None
    };
    Ok(ReproductionNumbers { r0, r1, r_im })
}
