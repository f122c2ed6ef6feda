//! Exact checks of the inequality chains behind the two thresholds, the
//! bound formulas for `f(k)`, and propagation of equality along `n + k`
//! and `c n`.
//!
//! Everything is exact rational arithmetic except `e` and `ln k`, which are
//! enclosed in intervals (see [`interval`]).

mod fvalues;
mod inequalities;
pub mod interval;
mod propagate;

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::numerics::{format_rational, Rational};

pub use fvalues::{f_bound_crossover, f_bound_values, FBoundValues};
pub use inequalities::{
    careful_estimate_claim, few_negatives_check, suite_thm1, suite_thm2, thm1_threshold,
    thm1_threshold_check, thm2_first_stage_binomial, thm2_range_check, thm2_stage_check,
    thm2_two_range_count, unimodal_gap_lb, CarefulEstimate,
};
pub use propagate::{f_readings, propagate_equality, FReadings, Propagation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("p = {p} out of range 1..={max}")]
    POutOfRange { p: usize, max: usize },
    #[error("need k >= {min}, got {k}")]
    KTooSmall { k: usize, min: usize },
    #[error("need n >= {min}, got {n}")]
    NTooSmall { n: usize, min: usize },
    #[error("need p > 0 and q > 0")]
    NonPositive,
    #[error("unknown inequality {0:?}")]
    Unknown(String),
}

fn ser_rational<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(v))
}

/// One instance of a named inequality `lhs >= rhs` (or `>` when `strict`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub parameters: BTreeMap<String, String>,
    pub strict: bool,
    #[serde(serialize_with = "ser_rational")]
    pub lhs: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub rhs: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub margin: Rational,
    pub holds: bool,
    /// Whether the stated hypotheses of the inequality hold here. A report
    /// with an unmet precondition is informative, not a failure.
    pub precondition_met: bool,
    /// A second, independent evaluation agreed exactly.
    pub cross_check: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sub_checks: Vec<BoundReport>,
}

impl BoundReport {
    pub(crate) fn new(name: &str, lhs: Rational, rhs: Rational, strict: bool) -> Self {
        let holds = if strict { lhs > rhs } else { lhs >= rhs };
        BoundReport {
            name: name.to_string(),
            parameters: BTreeMap::new(),
            strict,
            margin: &lhs - &rhs,
            lhs,
            rhs,
            holds,
            precondition_met: true,
            cross_check: true,
            sub_checks: Vec::new(),
        }
    }

    pub(crate) fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub(crate) fn cross(mut self, agrees: bool) -> Self {
        self.cross_check = agrees;
        self
    }

    /// Holds, its cross-check agrees, and so do all sub-checks that carry
    /// a met precondition.
    pub fn all_hold(&self) -> bool {
        self.holds
            && self.cross_check
            && self.sub_checks.iter().filter(|c| c.precondition_met).all(BoundReport::all_hold)
    }
}

pub(crate) fn rpow(x: &Rational, e: u32) -> Rational {
    let mut acc = Rational::from_integer(1.into());
    for _ in 0..e {
        acc *= x;
    }
    acc
}

pub(crate) fn ri(v: i64) -> Rational {
    Rational::from_integer(v.into())
}
