use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// Canonical parameter names, in the order used by every file format.
pub const PARAM_NAMES: [&str; 26] = [
    "a1", "b1", "d1", "epsilon", "l1", "k", "a2", "d", "b2", "g1", "m_d", "s", "r", "o", "g2", "m",
    "l3", "g", "p_M", "j_M", "p", "theta", "v_M", "n_M", "chi", "xi",
];

/// Parameters that set a denominator or a decay/growth scale and so must be
/// strictly positive. Every other rate may be zero (mechanism switched off).
const STRICTLY_POSITIVE: [&str; 13] = [
    "a1", "b1", "a2", "d", "b2", "g1", "o", "m", "g", "j_M", "theta", "n_M", "xi",
];

/// Rate and threshold constants of the five-compartment model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Normal-cell logistic growth rate.
    pub a1: f64,
    /// Normal-cell crowding coefficient.
    pub b1: f64,
    /// Tumor-induced inhibition of normal cells.
    pub d1: f64,
    /// Saturation coefficient of the tumor inhibition term.
    pub epsilon: f64,
    /// Estrogen-driven transformation of normal cells into tumor cells.
    pub l1: f64,
    /// Endocrine-therapy efficacy in `[0, 1]`.
    pub k: f64,
    /// Tumor growth rate.
    pub a2: f64,
    /// Ketogenic-diet factor on tumor growth.
    pub d: f64,
    /// Tumor crowding coefficient.
    pub b2: f64,
    /// Immune kill rate of tumor cells.
    pub g1: f64,
    /// Tumor death rate from nutrient starvation.
    pub m_d: f64,
    /// Immune source rate.
    pub s: f64,
    /// Immune response rate to tumor.
    pub r: f64,
    /// Immune response threshold.
    pub o: f64,
    /// Immune inactivation by tumor.
    pub g2: f64,
    /// Immune natural death rate.
    pub m: f64,
    /// Estrogen suppression of immunity.
    pub l3: f64,
    /// Estrogen threshold of immune suppression.
    pub g: f64,
    /// Immunotherapy activation rate of immune cells.
    #[serde(rename = "p_M")]
    pub p_m: f64,
    /// Immunotherapy half-saturation.
    #[serde(rename = "j_M")]
    pub j_m: f64,
    /// Estrogen source rate.
    pub p: f64,
    /// Estrogen washout rate.
    pub theta: f64,
    /// Immunotherapy infusion rate.
    #[serde(rename = "v_M")]
    pub v_m: f64,
    /// Drug turnover rate.
    #[serde(rename = "n_M")]
    pub n_m: f64,
    /// Drug production from activated immune cells.
    pub chi: f64,
    /// Immune half-saturation of drug production.
    pub xi: f64,
}

impl ModelParams {
    /// Fraction of estrogen action left after endocrine therapy, `1 - k`.
    #[inline]
    pub fn unblocked(&self) -> f64 {
        1.0 - self.k
    }

    /// Steady estrogen level `p(1-k)/theta`, shared by every equilibrium.
    #[inline]
    pub fn estrogen_star(&self) -> f64 {
        self.p * (1.0 - self.k) / self.theta
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "a1" => self.a1,
            "b1" => self.b1,
            "d1" => self.d1,
            "epsilon" => self.epsilon,
            "l1" => self.l1,
            "k" => self.k,
            "a2" => self.a2,
            "d" => self.d,
            "b2" => self.b2,
            "g1" => self.g1,
            "m_d" => self.m_d,
            "s" => self.s,
            "r" => self.r,
            "o" => self.o,
            "g2" => self.g2,
            "m" => self.m,
            "l3" => self.l3,
            "g" => self.g,
            "p_M" => self.p_m,
            "j_M" => self.j_m,
            "p" => self.p,
            "theta" => self.theta,
            "v_M" => self.v_m,
            "n_M" => self.n_m,
            "chi" => self.chi,
            "xi" => self.xi,
            _ => return None,
        })
    }

    /// Returns a copy with `name` set to `value`, or an error for an unknown name.
    pub fn with(&self, name: &str, value: f64) -> Result<Self> {
        let mut out = *self;
        let slot = match name {
            "a1" => &mut out.a1,
            "b1" => &mut out.b1,
            "d1" => &mut out.d1,
            "epsilon" => &mut out.epsilon,
            "l1" => &mut out.l1,
            "k" => &mut out.k,
            "a2" => &mut out.a2,
            "d" => &mut out.d,
            "b2" => &mut out.b2,
            "g1" => &mut out.g1,
            "m_d" => &mut out.m_d,
            "s" => &mut out.s,
            "r" => &mut out.r,
            "o" => &mut out.o,
            "g2" => &mut out.g2,
            "m" => &mut out.m,
            "l3" => &mut out.l3,
            "g" => &mut out.g,
            "p_M" => &mut out.p_m,
            "j_M" => &mut out.j_m,
            "p" => &mut out.p,
            "theta" => &mut out.theta,
            "v_M" => &mut out.v_m,
            "n_M" => &mut out.n_m,
            "chi" => &mut out.chi,
            "xi" => &mut out.xi,
            _ => return Err(ModelError::InvalidInput(format!("unknown parameter `{name}`"))),
        };
        *slot = value;
        Ok(out)
    }

    /// All values in [`PARAM_NAMES`] order.
    pub fn values(&self) -> [f64; 26] {
        PARAM_NAMES.map(|n| self.get(n).expect("canonical name"))
    }

    /// Lists every constraint violation; an empty report means the set is usable.
    pub fn validate(&self) -> Vec<String> {
        let mut report = Vec::new();
        for name in PARAM_NAMES {
            let v = self.get(name).expect("canonical name");
            if !v.is_finite() {
                report.push(format!("{name} must be finite"));
                continue;
            }
            if name == "k" {
                if !(0.0..=1.0).contains(&v) {
                    report.push("k outside [0,1]".to_string());
                }
            } else if STRICTLY_POSITIVE.contains(&name) {
                if v <= 0.0 {
                    report.push(format!("{name} must be positive"));
                }
            } else if v < 0.0 {
                report.push(format!("{name} must be non-negative"));
            }
        }
        report
    }

    /// Like [`validate`](Self::validate) but as a `Result`.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_empty() {
            Ok(())
        } else {
            Err(ModelError::InvalidParams(report))
        }
    }

    /// Whether `name` must be strictly positive.
    pub fn requires_positive(name: &str) -> bool {
        STRICTLY_POSITIVE.contains(&name)
    }
}

impl Default for ModelParams {
    /// Illustrative O(1) magnitudes. Not calibrated to any data set.
    fn default() -> Self {
        Self {
            a1: 0.6,
            b1: 0.5,
            d1: 0.3,
            epsilon: 0.5,
            l1: 0.05,
            k: 0.5,
            a2: 0.8,
            d: 0.6,
            b2: 0.9,
            g1: 1.2,
            m_d: 0.1,
            s: 0.33,
            r: 0.2,
            o: 0.3,
            g2: 0.3,
            m: 0.29,
            l3: 0.1,
            g: 0.5,
            p_m: 0.2,
            j_m: 0.5,
            p: 0.4,
            theta: 0.6,
            v_m: 0.1,
            n_m: 0.5,
            chi: 0.1,
            xi: 0.4,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        assert!(ModelParams::default().validate().is_empty());
    }

    #[test]
    fn k_out_of_range() {
        let p = ModelParams { k: 1.5, ..Default::default() };
        assert_eq!(p.validate(), vec!["k outside [0,1]".to_string()]);
    }

    #[test]
    fn theta_zero_rejected() {
        let p = ModelParams { theta: 0.0, ..Default::default() };
        assert_eq!(p.validate(), vec!["theta must be positive".to_string()]);
    }

    #[test]
    fn non_finite_rejected() {
        let p = ModelParams { r: f64::NAN, ..Default::default() };
        assert_eq!(p.validate(), vec!["r must be finite".to_string()]);
        let p = ModelParams { d1: f64::INFINITY, ..Default::default() };
        assert!(!p.validate().is_empty());
    }

    #[test]
    fn switchable_rates_may_be_zero() {
        let p = ModelParams { chi: 0.0, p_m: 0.0, l1: 0.0, s: 0.0, v_m: 0.0, epsilon: 0.0, ..Default::default() };
        assert!(p.validate().is_empty());
        let p = ModelParams { chi: -0.1, ..Default::default() };
        assert_eq!(p.validate(), vec!["chi must be non-negative".to_string()]);
    }

    #[test]
    fn get_and_with_cover_every_name() {
        let p = ModelParams::default();
        for (i, name) in PARAM_NAMES.iter().enumerate() {
            let q = p.with(name, 100.0 + i as f64).unwrap();
            assert_eq!(q.get(name), Some(100.0 + i as f64));
        }
        assert!(p.with("nope", 1.0).is_err());
        assert_eq!(p.get("nope"), None);
    }

    #[test]
    fn json_uses_transliterated_names() {
        let json = serde_json::to_value(ModelParams::default()).unwrap();
        let keys: Vec<_> = json.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, PARAM_NAMES.to_vec());
        let mut obj = json.as_object().unwrap().clone();
        obj.insert("extra".into(), 1.0.into());
        assert!(serde_json::from_value::<ModelParams>(obj.into()).is_err());
    }
}
