//! Scenario documents: parameters, initial state, integration settings and
//! optional sweep/bifurcation requests, all in one JSON file.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::integrator::IntegrationConfig;
use crate::model::{ModelParams, SystemState, PARAM_NAMES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub label: String,
    /// Seed for every randomized procedure run from this scenario.
    #[serde(default)]
    pub seed: u64,
    /// Trajectory samples, both endpoints included.
    pub sample_count: usize,
    pub params: ModelParams,
    pub initial_state: SystemState,
    pub integration: IntegrationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bifurcation: Option<BifurcationSpec>,
}

impl Scenario {
    /// Parses and validates.
    pub fn from_json(text: &str) -> Result<Self> {
        let sc: Scenario =
            serde_json::from_str(text).map_err(|e| ModelError::InvalidInput(format!("scenario: {e}")))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.label.is_empty()
            || !self.label.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        {
            return Err(ModelError::InvalidInput(format!(
                "label `{}` must be non-empty and use only [A-Za-z0-9_.-]",
                self.label
            )));
        }
        if self.sample_count < 2 {
            return Err(ModelError::InvalidInput("sample_count must be at least 2".into()));
        }
        self.params.ensure_valid()?;
        self.integration.validate()?;
        if !(self.initial_state.is_finite() && self.initial_state.is_nonnegative()) {
            return Err(ModelError::InvalidInput("initial_state must be finite and nonnegative".into()));
        }
        if let Some(s) = &self.sweep {
            s.validate(&self.params)?;
        }
        if let Some(b) = &self.bifurcation {
            b.validate(&self.params)?;
        }
        Ok(())
    }

    /// Integration settings with `sample_count` applied.
    pub fn integration_config(&self) -> IntegrationConfig {
        self.integration.with_samples(self.sample_count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Explicit values, or `count` points from `min` to `max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Range {
        min: f64,
        max: f64,
        count: usize,
        #[serde(default)]
        spacing: Spacing,
    },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Grid::Values(ref v) => v.clone(),
            Grid::Range { min, max, count, spacing } => {
                if count == 1 {
                    return vec![min];
                }
                let last = (count - 1) as f64;
                (0..count)
                    .map(|j| {
                        if j + 1 == count {
                            return max;
                        }
                        let f = j as f64 / last;
                        match spacing {
                            Spacing::Linear => min + f * (max - min),
                            Spacing::Log => min * (max / min).powf(f),
                        }
                    })
                    .collect()
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Grid::Values(ref v) if v.is_empty() => Err(ModelError::InvalidInput("empty grid".into())),
            Grid::Values(_) => Ok(()),
            Grid::Range { min, max, count, spacing } => {
                if count == 0 || !(min.is_finite() && max.is_finite()) || max < min {
                    return Err(ModelError::InvalidInput("grid needs finite min <= max and count >= 1".into()));
                }
                if spacing == Spacing::Log && min <= 0.0 {
                    return Err(ModelError::InvalidInput("log grid needs min > 0".into()));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub parameter: String,
    pub grid: Grid,
}

impl Axis {
    fn validate(&self, base: &ModelParams) -> Result<()> {
        if !PARAM_NAMES.contains(&self.parameter.as_str()) {
            return Err(ModelError::InvalidInput(format!("unknown parameter `{}`", self.parameter)));
        }
        self.grid.validate()?;
        for v in self.grid.values() {
            let p = base.with(&self.parameter, v)?;
            let problems = p.validate();
            if !problems.is_empty() {
                return Err(ModelError::InvalidInput(format!(
                    "{} = {v} is outside the valid range: {}",
                    self.parameter,
                    problems.join("; ")
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    Equilibria,
    Stability,
    Repro,
    Settle,
}

fn default_analyses() -> Vec<Analysis> {
    vec![Analysis::Equilibria, Analysis::Stability, Analysis::Repro]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(flatten)]
    pub axis: Axis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second: Option<Axis>,
    #[serde(default = "default_analyses")]
    pub analyses: Vec<Analysis>,
}

impl SweepSpec {
    pub fn new(axis: Axis) -> Self {
        Self { axis, second: None, analyses: default_analyses() }
    }

    pub fn validate(&self, base: &ModelParams) -> Result<()> {
        self.axis.validate(base)?;
        if let Some(s) = &self.second {
            s.validate(base)?;
            if s.parameter == self.axis.parameter {
                return Err(ModelError::InvalidInput("the two sweep parameters must differ".into()));
            }
        }
        if self.analyses.is_empty() {
            return Err(ModelError::InvalidInput("no analyses requested".into()));
        }
        Ok(())
    }

    pub fn wants(&self, a: Analysis) -> bool {
        self.analyses.contains(&a)
    }
}

pub const DEFAULT_BIFURCATION_POINTS: usize = 64;

fn default_points() -> usize {
    DEFAULT_BIFURCATION_POINTS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BifurcationSpec {
    pub parameter: String,
    pub min: f64,
    pub max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

impl BifurcationSpec {
    pub fn validate(&self, base: &ModelParams) -> Result<()> {
        if self.points < 2 || !(self.min < self.max) {
            return Err(ModelError::InvalidInput("bifurcation range needs min < max and at least 2 points".into()));
        }
        Axis { parameter: self.parameter.clone(), grid: Grid::Values(vec![self.min, self.max]) }.validate(base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "label": "t1",
        "sample_count": 11,
        "params": {"a1":0.6,"b1":0.5,"d1":0.3,"epsilon":0.5,"l1":0.05,"k":0.5,"a2":0.8,"d":0.6,"b2":0.9,
                   "g1":1.2,"m_d":0.1,"s":0.33,"r":0.2,"o":0.3,"g2":0.3,"m":0.29,"l3":0.1,"g":0.5,"p_M":0.2,
                   "j_M":0.5,"p":0.4,"theta":0.6,"v_M":0.1,"n_M":0.5,"chi":0.1,"xi":0.4},
        "initial_state": {"N":0.8,"T":0.3,"I":1.1,"E":0.35,"M":0.2},
        "integration": {"t0":0,"t_end":10}
    }"#;

    #[test]
    fn parses_minimal_document() {
        let sc = Scenario::from_json(MINIMAL).unwrap();
        assert_eq!(sc.params, ModelParams::default());
        assert_eq!(sc.integration_config().samples, 11);
    }

    #[test]
    fn rejects_missing_and_unknown_parameters() {
        let missing = MINIMAL.replace("\"xi\":0.4", "\"zz\":0.4");
        assert!(Scenario::from_json(&missing).is_err());
        let extra = MINIMAL.replace("\"xi\":0.4", "\"xi\":0.4,\"q\":1");
        assert!(Scenario::from_json(&extra).is_err());
    }

    #[test]
    fn grids() {
        let g = Grid::Range { min: 0.0, max: 1.0, count: 5, spacing: Spacing::Linear };
        assert_eq!(g.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g = Grid::Range { min: 1e-3, max: 1.0, count: 4, spacing: Spacing::Log };
        let v = g.values();
        assert!((v[1] - 1e-2).abs() < 1e-15 && v[3] == 1.0);
    }

    #[test]
    fn sweep_grid_must_stay_valid() {
        let base = ModelParams::default();
        let bad = SweepSpec::new(Axis { parameter: "k".into(), grid: Grid::Values(vec![0.5, 1.5]) });
        assert!(bad.validate(&base).is_err());
        let ok = SweepSpec::new(Axis { parameter: "k".into(), grid: Grid::Values(vec![0.0, 1.0]) });
        assert!(ok.validate(&base).is_ok());
    }

    #[test]
    fn sweep_spec_json_shape() {
        let s: SweepSpec = serde_json::from_str(
            r#"{"parameter":"d","grid":{"min":0.1,"max":1,"count":3},"second":{"parameter":"k","grid":[0,0.5]},"analyses":["equilibria","settle"]}"#,
        )
        .unwrap();
        assert_eq!(s.axis.grid.values().len(), 3);
        assert!(s.wants(Analysis::Settle) && !s.wants(Analysis::Stability));
    }
}
