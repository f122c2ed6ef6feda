//! Exact `A(n, k)` at desk scale and heuristic upper bounds.
//!
//! A configuration's non-negative family is a filter of the dominance
//! order, so `A(n, k)` is the size of the smallest filter some sorted
//! configuration with non-negative total realizes exactly. Realizability
//! is a linear feasibility question decided in exact arithmetic, with a
//! certificate either way.

mod filter;
mod fm;
mod lp;
mod range;
mod search;
mod simplex;
mod upper;

use thiserror::Error;

use crate::numerics::NumericsError;

pub use filter::FilterFamily;
pub use fm::{fourier_motzkin_feasible, FM_CONSTRAINT_LIMIT};
pub use lp::{filter_constraints, lp_feasible, CertificateKind, Constraint, FeasibilityCertificate};
pub use range::{verify_conjecture_range, RangeRow, Verdict};
pub use search::{exact_a, exact_a_with, SolverResult};
pub use simplex::find_nonneg_solution;
pub use upper::{search_upper_bound, Strategy, UpperBound};

/// Largest `C(n, k)` the exact solver accepts by default.
pub const DEFAULT_CAP: u64 = 120;
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("need 1 <= k <= n, got n = {n}, k = {k}")]
    InvalidNk { n: usize, k: usize },
    #[error("C({n},{k}) exceeds the cap of {cap} subsets")]
    OverCap { n: usize, k: usize, cap: u64 },
    #[error("invalid subset {0}")]
    BadSubset(String),
    #[error("family is not up-closed")]
    NotUpClosed,
    #[error("certificate failed exact re-check: {0}")]
    CertificateFailed(String),
    #[error("thread pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Maximum number of candidate filters.
    pub budget: u64,
    /// 0 uses all cores.
    pub workers: usize,
    pub cap: u64,
    /// Re-check every certificate exactly.
    pub verify_certificates: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            budget: DEFAULT_BUDGET,
            workers: 0,
            cap: DEFAULT_CAP,
            verify_certificates: true,
        }
    }
}
