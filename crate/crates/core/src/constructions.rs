//! The explicit configurations: star, mirror and the `n = 3k+1`
//! counterexample, each paired with its predicted number of non-negative
//! k-sums.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{binomial, rat, Configuration};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionName {
    Star,
    Mirror,
    MmsCounterexample,
}

impl fmt::Display for ConstructionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstructionName::Star => "star",
            ConstructionName::Mirror => "mirror",
            ConstructionName::MmsCounterexample => "mms_counterexample",
        })
    }
}

impl FromStr for ConstructionName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "star" => Ok(ConstructionName::Star),
            "mirror" => Ok(ConstructionName::Mirror),
            "counterexample" | "mms_counterexample" => Ok(ConstructionName::MmsCounterexample),
            other => Err(format!("unknown construction {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("need n >= k >= 1, got n = {n}, k = {k}")]
    InvalidNk { n: usize, k: usize },
    #[error("counterexample needs k >= 2, got {0}")]
    KTooSmall(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedConstruction {
    pub name: ConstructionName,
    pub n: usize,
    pub k: usize,
    pub config: Configuration,
    pub predicted_count: BigUint,
    pub prediction_formula: &'static str,
}

fn check_nk(n: usize, k: usize) -> Result<(), ConstructionError> {
    if k == 0 || n < k {
        return Err(ConstructionError::InvalidNk { n, k });
    }
    Ok(())
}

/// `(n-1, -1, ..., -1)`: exactly the k-sets containing index 1 are
/// non-negative.
pub fn star_config(n: usize, k: usize) -> Result<NamedConstruction, ConstructionError> {
    check_nk(n, k)?;
    let mut values = vec![rat(n as i64 - 1)];
    values.extend(std::iter::repeat_with(|| rat(-1)).take(n - 1));
    Ok(NamedConstruction {
        name: ConstructionName::Star,
        n,
        k,
        config: Configuration::new(values).expect("n >= 1"),
        predicted_count: binomial(n as u64 - 1, k as i64 - 1),
        prediction_formula: "C(n-1,k-1)",
    })
}

/// `(1, ..., 1, -(n-1))`: exactly the k-sets avoiding index `n` are
/// non-negative, except at `n = k` where the single k-set sums to zero.
pub fn mirror_config(n: usize, k: usize) -> Result<NamedConstruction, ConstructionError> {
    check_nk(n, k)?;
    let mut values: Vec<_> = std::iter::repeat_with(|| rat(1)).take(n - 1).collect();
    values.push(rat(-(n as i64 - 1)));
    Ok(NamedConstruction {
        name: ConstructionName::Mirror,
        n,
        k,
        config: Configuration::new(values).expect("n >= 1"),
        predicted_count: if n == k {
            1u32.into()
        } else {
            binomial(n as u64 - 1, k as i64)
        },
        prediction_formula: "C(n-1,k), or 1 when n = k",
    })
}

/// `3k-2` copies of `3` and three copies of `-(3k-2)`, so `n = 3k+1`.
///
/// `3(k-1) - (3k-2) = -1`, so any k-set touching a negative entry is
/// negative and the count is `C(n-3, k)`.
pub fn mms_counterexample(k: usize) -> Result<NamedConstruction, ConstructionError> {
    if k < 2 {
        return Err(ConstructionError::KTooSmall(k));
    }
    let n = 3 * k + 1;
    let neg = -(3 * k as i64 - 2);
    let mut values: Vec<_> = std::iter::repeat_with(|| rat(3)).take(3 * k - 2).collect();
    values.extend(std::iter::repeat_with(|| rat(neg)).take(3));
    Ok(NamedConstruction {
        name: ConstructionName::MmsCounterexample,
        n,
        k,
        config: Configuration::new(values).expect("n >= 1"),
        predicted_count: binomial(n as u64 - 3, k as i64),
        prediction_formula: "C(n-3,k)",
    })
}

/// Builds a construction by name. The counterexample ignores `n`.
pub fn construct(
    name: ConstructionName,
    n: usize,
    k: usize,
) -> Result<NamedConstruction, ConstructionError> {
    match name {
        ConstructionName::Star => star_config(n, k),
        ConstructionName::Mirror => mirror_config(n, k),
        ConstructionName::MmsCounterexample => mms_counterexample(k),
    }
}

/// `C(n-3, k) < C(n-1, k-1)` at `n = 3k+1`, with exact binomials.
pub fn counterexample_beats_target(k: usize) -> Result<bool, ConstructionError> {
    if k < 2 {
        return Err(ConstructionError::KTooSmall(k));
    }
    let n = 3 * k as u64 + 1;
    Ok(binomial(n - 3, k as i64) < binomial(n - 1, k as i64 - 1))
}

/// The closed-form predicate `(k-1)(k-2) > 0`.
pub fn counterexample_predicate(k: usize) -> bool {
    (k as i128 - 1) * (k as i128 - 2) > 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::count_nonneg_ksums;
    use num_traits::Zero;

    #[test]
    fn star_examples() {
        assert_eq!(star_config(8, 3).unwrap().predicted_count, 21u32.into());
        assert_eq!(star_config(4, 4).unwrap().predicted_count, 1u32.into());
        let s = star_config(10, 2).unwrap();
        assert_eq!(s.predicted_count, 9u32.into());
        assert_eq!(count_nonneg_ksums(&s.config, 2).unwrap().count, 9u32.into());
        assert!(star_config(2, 3).is_err());
        assert!(star_config(3, 0).is_err());
    }

    #[test]
    fn mirror_examples() {
        assert_eq!(mirror_config(8, 3).unwrap().predicted_count, 35u32.into());
        for k in 1..8 {
            let m = mirror_config(2 * k, k).unwrap();
            assert_eq!(m.predicted_count, binomial(2 * k as u64 - 1, k as i64 - 1));
        }
        assert_eq!(mirror_config(3, 3).unwrap().predicted_count, 1u32.into());
        let m = mirror_config(6, 2).unwrap();
        assert_eq!(m.predicted_count, 10u32.into());
        assert_eq!(count_nonneg_ksums(&m.config, 2).unwrap().count, 10u32.into());
    }

    #[test]
    fn counterexample_examples() {
        let c = mms_counterexample(3).unwrap();
        assert_eq!(c.n, 10);
        assert_eq!(c.predicted_count, 35u32.into());
        let c = mms_counterexample(5).unwrap();
        assert_eq!(c.n, 16);
        assert_eq!(c.predicted_count, 1287u32.into());
        let c = mms_counterexample(2).unwrap();
        assert_eq!(c.n, 7);
        assert_eq!(c.predicted_count, 6u32.into());
        assert_eq!(c.predicted_count, binomial(6, 1));
        assert!(mms_counterexample(1).is_err());
    }

    #[test]
    fn beats_target_examples() {
        assert!(!counterexample_beats_target(2).unwrap());
        assert!(counterexample_beats_target(3).unwrap());
        assert!(counterexample_beats_target(5).unwrap());
        assert_eq!(binomial(13, 5), 1287u32.into());
        assert_eq!(binomial(15, 4), 1365u32.into());
    }

    #[test]
    fn two_derivations_agree() {
        for k in 2..=50 {
            assert_eq!(
                counterexample_beats_target(k).unwrap(),
                counterexample_predicate(k),
                "k = {k}"
            );
        }
    }

    #[test]
    fn predictions_match_enumeration() {
        for k in 2..=5 {
            for n in k..=16 {
                for c in [star_config(n, k).unwrap(), mirror_config(n, k).unwrap()] {
                    assert!(c.config.total_sum().is_zero());
                    let got = count_nonneg_ksums(&c.config, k).unwrap().count;
                    assert_eq!(got, c.predicted_count, "{} n={n} k={k}", c.name);
                }
            }
            let c = mms_counterexample(k).unwrap();
            assert!(c.config.total_sum().is_zero());
            assert_eq!(count_nonneg_ksums(&c.config, k).unwrap().count, c.predicted_count);
        }
    }

    #[test]
    fn names_parse() {
        assert_eq!("counterexample".parse(), Ok(ConstructionName::MmsCounterexample));
        assert_eq!("star".parse(), Ok(ConstructionName::Star));
        assert!("foo".parse::<ConstructionName>().is_err());
    }
}
