//! Exact arithmetic, sorted configurations, k-subsets and the dominance order.
//!
//! Everything here is exact: values are [`Rational`]s, counts are
//! arbitrary-precision integers. Indices into a configuration are 1-based
//! throughout the crate, so `KSubset` `{1, 2}` names the two largest values.

mod binomial;
mod config;
mod count;
mod subset;

pub use binomial::{binomial, binomial_u64};
pub use config::{format_rational, parse_rational, Configuration, ParseError};
pub use count::{
    count_nonneg_ksums, count_nonneg_ksums_with_budget, is_central, ksum, NonnegCount,
    DEFAULT_ENUMERATION_BUDGET,
};
pub(crate) use count::ScaledValues;
pub use subset::{gale_dominates, KSubset, SubsetFamily};

use thiserror::Error;

/// Exact rational number in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericsError {
    #[error("configuration must contain at least one value")]
    EmptyConfiguration,
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("k-subset indices must be strictly increasing: {0:?}")]
    NotIncreasing(Vec<usize>),
    #[error("k = {k} is invalid for n = {n}")]
    InvalidK { n: usize, k: usize },
    #[error("subsets have mismatched sizes ({left} vs {right})")]
    Mismatched { left: usize, right: usize },
    #[error("enumeration needs {needed} evaluations, budget is {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
}

/// Integer as a [`Rational`].
pub fn rat(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

/// `p/q` as a [`Rational`]; panics if `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}
