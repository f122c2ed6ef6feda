//! Exact tools for the minimal number of non-negative k-sums.
//!
//! Given `n` reals with non-negative total, how few of the `C(n, k)`
//! k-element subsets can have a non-negative sum? Write `A(n, k)` for that
//! minimum. The star configuration `(n-1, -1, ..., -1)` gives
//! `C(n-1, k-1)`, and the conjecture is that this is optimal once `n >= 4k`.
//!
//! The crate is split by task:
//!
//! * [`numerics`]: exact rationals, sorted configurations, k-subsets, the
//!   dominance order and the counting objective.
//! * [`constructions`]: the star, mirror and `n = 3k+1` counterexample
//!   configurations with their predicted counts.
//! * [`partition`]: parallel-class factorizations of `[n]^(k)` for `k | n`
//!   and the one-witness-per-class lower bound.
//! * [`witness`]: certifying witness extraction following the two
//!   large-`n` arguments (threshold `3k^{k+1}+k^3` and `k(4e ln k)^k`).
//! * [`solver`]: exact `A(n, k)` for small instances by filter enumeration
//!   and exact LP feasibility, plus heuristic upper-bound search.
//! * [`bounds`]: exact verification of the inequality chains, rigorous
//!   interval evaluation of the transcendental thresholds, and equality
//!   propagation.
//!
//! Logarithms are natural logarithms everywhere.

/// Crate version, recorded in report manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod bounds;
pub mod constructions;
pub mod numerics;
pub mod partition;
pub mod solver;
pub mod witness;

pub use numerics::{
    binomial, count_nonneg_ksums, gale_dominates, is_central, ksum, Configuration, KSubset,
    Rational, SubsetFamily,
};
