use serde::{Deserialize, Serialize};

/// A named predicate together with the two sides it compares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

impl Condition {
    pub fn lt(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self { name: name.into(), holds: lhs < rhs, lhs, rhs }
    }

    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self { name: name.into(), holds: lhs <= rhs, lhs, rhs }
    }

    pub fn gt(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self { name: name.into(), holds: lhs > rhs, lhs, rhs }
    }

    pub fn ge(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self { name: name.into(), holds: lhs >= rhs, lhs, rhs }
    }

    /// A condition with no meaningful numeric sides.
    pub fn flag(name: impl Into<String>, holds: bool) -> Self {
        Self { name: name.into(), holds, lhs: f64::NAN, rhs: f64::NAN }
    }

    pub fn with_holds(mut self, holds: bool) -> Self {
        self.holds = holds;
        self
    }
}

/// `num / den`, with `0/0 = 0` and `x/0 = ±∞`.
pub(crate) fn safe_ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(num)
        }
    } else {
        num / den
    }
}

pub fn find<'a>(conds: &'a [Condition], name: &str) -> Option<&'a Condition> {
    conds.iter().find(|c| c.name == name)
}
