//! Certifying witness extraction for the two large-`n` arguments.
//!
//! Each extractor walks the case analysis of its argument on a concrete
//! sorted configuration, emits the family of k-subsets that the argument
//! shows to be non-negative, and then certifies it: every explicit member
//! (or every sampled member of a counted family) is re-summed exactly.
//!
//! * [`extract_thm1`]: x₁ central; else fewer than `2k` negatives; else trim
//!   to a multiple of `k` and take one witness per parallel class, plus
//!   x₁ with any `k-1` of the `⌊n/k⌋` next-largest values.
//! * [`extract_thm2`]: test the stage maxima x₁, x₂, … for centrality
//!   while peeling off `k-1` smallest values per stage, for
//!   `T = ⌊n/2k⌋` stages; a central stage gives the substitution family,
//!   no central stage gives the two-range family.
//!
//! `log` is the natural logarithm. Fractional parameters are floored:
//! `T = ⌊n/2k⌋`, `J = ⌊n/(2 ln k)⌋`, `|Z| = ⌊n/k⌋`.

mod certify;
mod thm1;
mod thm2;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Signed;
use serde::Serialize;
use thiserror::Error;

use crate::numerics::{Configuration, NumericsError, Rational, SubsetFamily};
use crate::partition::PartitionError;

pub use certify::certify_family;
pub use thm1::extract_thm1;
pub use thm2::{extract_thm2, substitution_family, two_range_parameters};

/// Explicit families larger than this are produced in counted mode when the
/// mode is [`WitnessMode::Auto`].
pub const EXPLICIT_THRESHOLD: u64 = 1_000_000;
/// Hard cap for [`WitnessMode::Explicit`].
pub const EXPLICIT_HARD_CAP: u64 = 20_000_000;
pub const DEFAULT_SAMPLE_SIZE: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("configuration has negative total sum")]
    NegativeTotal,
    #[error("n = {n} is too small: need n >= {min}")]
    NTooSmall { n: usize, min: usize },
    #[error("j = {j} out of range 1..={max}")]
    JOutOfRange { j: usize, max: usize },
    #[error("stage {stage} maximum is not central in its working set")]
    NotCentral { stage: usize },
    #[error("stage {stage} out of range 1..={max}")]
    StageOutOfRange { stage: usize, max: usize },
    #[error("medium range ends at index {needed} but only indices up to {available} survive")]
    RangeInfeasible { needed: usize, available: usize },
    #[error("explicit family of {0} members exceeds the hard cap")]
    ExplicitTooLarge(String),
    #[error("exact re-check failed: {0}")]
    Unsound(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    #[serde(rename = "central_at_top")]
    CentralAtTop,
    #[serde(rename = "few_negatives")]
    FewNegatives,
    #[serde(rename = "trim_and_partition_plus_top_zone")]
    TrimAndPartitionPlusTopZone,
    #[serde(rename = "central_at_stage_i")]
    CentralAtStage,
    #[serde(rename = "two_range_family")]
    TwoRangeFamily,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::CentralAtTop => "central_at_top",
            Branch::FewNegatives => "few_negatives",
            Branch::TrimAndPartitionPlusTopZone => "trim_and_partition_plus_top_zone",
            Branch::CentralAtStage => "central_at_stage_i",
            Branch::TwoRangeFamily => "two_range_family",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessMode {
    /// Explicit iff the guaranteed count is at most [`EXPLICIT_THRESHOLD`].
    #[default]
    Auto,
    Explicit,
    Counted,
}

#[derive(Debug, Clone)]
pub struct WitnessOptions {
    pub mode: WitnessMode,
    pub sample_size: usize,
    pub seed: u64,
    /// Threads for certifying explicit families; 0 uses the global pool.
    pub workers: usize,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            mode: WitnessMode::Auto,
            sample_size: DEFAULT_SAMPLE_SIZE,
            seed: 0,
            workers: 0,
        }
    }
}

/// One stage of the iterated centrality test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageTrace {
    pub stage_index: usize,
    /// Original index of the stage maximum.
    pub surviving_top: usize,
    /// Smallest elements removed before this stage.
    pub removed_bottom: usize,
    pub central: bool,
    pub stage_set_size: usize,
}

/// A labelled sub-family with its exact size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyPart {
    pub label: &'static str,
    pub count: BigUint,
}

#[derive(Debug, Clone)]
pub struct WitnessReport {
    pub theorem: u8,
    pub n: usize,
    pub k: usize,
    pub branch: Branch,
    pub witnesses: SubsetFamily,
    pub guaranteed_count: BigUint,
    pub parts: Vec<FamilyPart>,
    pub trace: Vec<StageTrace>,
    pub parameters: BTreeMap<String, String>,
    pub certified: bool,
    /// `C(n-1, k-1)`.
    pub target: BigUint,
    /// Whether `n` lies in the argument's range (`n >= 3k^{k+1}+k^3`, resp.
    /// `n > k (4e ln k)^k`).
    pub in_theorem_range: bool,
}

impl WitnessReport {
    /// The family reaches `C(n-1, k-1)`.
    pub fn meets_target(&self) -> bool {
        self.witnesses.count() >= &self.target
    }

    pub fn below_guarantee(&self) -> bool {
        !self.meets_target()
    }

    /// In range, certified and reaching the target: the claim the argument
    /// makes for this instance.
    pub fn theorem_claim_holds(&self) -> Option<bool> {
        self.in_theorem_range
            .then(|| self.certified && self.meets_target() && self.guaranteed_count >= self.target)
    }
}

/// `-x_{j+1} (n - j) / j`, after re-checking `j x_1 + (n-j) x_{j+1} >= ΣX >= 0`
/// and `x_1 >= ` the returned bound.
pub fn eq2_bound(config: &Configuration, j: usize) -> Result<Rational, WitnessError> {
    let n = config.n();
    if j == 0 || j >= n {
        return Err(WitnessError::JOutOfRange { j, max: n.saturating_sub(1) });
    }
    let total = config.total_sum();
    if total.is_negative() {
        return Err(WitnessError::NegativeTotal);
    }
    let x1 = config.value(1)?;
    let xj1 = config.value(j + 1)?;
    let jr = Rational::from_integer(j.into());
    let rest = Rational::from_integer((n - j).into());
    let lhs = &jr * x1 + &rest * xj1;
    if lhs < total {
        return Err(WitnessError::Unsound(format!(
            "j x_1 + (n-j) x_(j+1) = {lhs} < total {total}"
        )));
    }
    let bound = -xj1 * rest / jr;
    if x1 < &bound {
        return Err(WitnessError::Unsound(format!("x_1 = {x1} < {bound}")));
    }
    Ok(bound)
}

pub(crate) fn check_total(config: &Configuration) -> Result<(), WitnessError> {
    if config.total_sum().is_negative() {
        Err(WitnessError::NegativeTotal)
    } else {
        Ok(())
    }
}

/// Whether a family of the given size is emitted explicitly.
pub(crate) fn wants_explicit(mode: WitnessMode, count: &BigUint) -> Result<bool, WitnessError> {
    match mode {
        WitnessMode::Auto => Ok(count <= &BigUint::from(EXPLICIT_THRESHOLD)),
        WitnessMode::Counted => Ok(false),
        WitnessMode::Explicit => {
            if count > &BigUint::from(EXPLICIT_HARD_CAP) {
                Err(WitnessError::ExplicitTooLarge(count.to_string()))
            } else {
                Ok(true)
            }
        }
    }
}
