use std::cmp::Ordering;

use num_bigint::BigInt;
use serde::Serialize;

use super::interval::{refine, thm2_threshold_interval, Interval, MAX_BITS};
use super::BoundsError;
use crate::numerics::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FBoundValues {
    pub k: usize,
    /// `(k-1)(k^k + k^2) + k`.
    pub old_bound: BigInt,
    /// Enclosure of `k (4 e ln k)^k`, as decimal `p/q` strings.
    pub new_bound_lo: String,
    pub new_bound_hi: String,
    pub new_bound_float: f64,
    /// `Less` when the new bound is the smaller one.
    #[serde(serialize_with = "ser_ordering")]
    pub new_vs_old: Ordering,
}

fn ser_ordering<S: serde::Serializer>(o: &Ordering, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(match o {
        Ordering::Less => "new_smaller",
        Ordering::Equal => "equal",
        Ordering::Greater => "old_smaller",
    })
}

fn old_bound(k: usize) -> BigInt {
    let kb = BigInt::from(k);
    (&kb - 1) * (kb.pow(k as u32) + kb.pow(2)) + &kb
}

/// Both upper bounds on `f(k)`, compared rigorously. The enclosure of the
/// new bound is refined until its relative width is below `1e-9`.
pub fn f_bound_values(k: usize) -> Result<FBoundValues, BoundsError> {
    if k < 3 {
        return Err(BoundsError::KTooSmall { k, min: 3 });
    }
    let old = old_bound(k);
    let point = Interval::point(Rational::from_integer(old.clone()));
    let tol = Rational::new(1.into(), 1_000_000_000.into());
    let iv = refine(
        MAX_BITS,
        |bits| thm2_threshold_interval(k as u64, bits),
        |iv| (iv.width() <= iv.lo() * &tol).then(|| iv.clone()),
    )
    .expect("enclosure converges");
    let cmp = refine(MAX_BITS, |bits| thm2_threshold_interval(k as u64, bits), |iv| iv.compare(&point))
        .expect("old bound is an integer, new bound is irrational");
    Ok(FBoundValues {
        k,
        old_bound: old,
        new_bound_lo: format_rational(iv.lo()),
        new_bound_hi: format_rational(iv.hi()),
        new_bound_float: iv.midpoint_f64(),
        new_vs_old: cmp,
    })
}

/// The smallest `k` in `3..=k_max` from which the new bound is below the
/// old one for every larger `k` in range, with the full table.
pub fn f_bound_crossover(k_max: usize) -> Result<(Option<usize>, Vec<FBoundValues>), BoundsError> {
    let table: Vec<FBoundValues> = (3..=k_max).map(f_bound_values).collect::<Result<_, _>>()?;
    let mut crossover = None;
    for row in table.iter().rev() {
        if row.new_vs_old == Ordering::Less {
            crossover = Some(row.k);
        } else {
            break;
        }
    }
    Ok((crossover, table))
}
