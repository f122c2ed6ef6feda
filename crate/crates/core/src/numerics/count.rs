use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{binomial, Configuration, KSubset, NumericsError, Rational, SubsetFamily};

/// Default cap on subset evaluations for explicit enumeration.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;

/// Exact sum of the values selected by `subset`.
pub fn ksum(config: &Configuration, subset: &KSubset) -> Result<Rational, NumericsError> {
    let mut acc = Rational::zero();
    for &i in subset.indices() {
        acc += config.value(i)?;
    }
    Ok(acc)
}

/// Result of [`count_nonneg_ksums`].
#[derive(Debug, Clone)]
pub struct NonnegCount {
    pub count: BigUint,
    pub family: SubsetFamily,
}

/// Counts and enumerates the k-subsets with non-negative sum. Sums equal to
/// zero count as non-negative.
pub fn count_nonneg_ksums(config: &Configuration, k: usize) -> Result<NonnegCount, NumericsError> {
    count_nonneg_ksums_with_budget(config, k, DEFAULT_ENUMERATION_BUDGET)
}

pub fn count_nonneg_ksums_with_budget(
    config: &Configuration,
    k: usize,
    budget: u64,
) -> Result<NonnegCount, NumericsError> {
    let n = config.n();
    if k == 0 || k > n {
        return Err(NumericsError::InvalidK { n, k });
    }
    let needed = binomial(n as u64, k as i64) * BigUint::from(n);
    if needed > BigUint::from(budget) {
        return Err(NumericsError::BudgetExceeded {
            needed: needed.to_string(),
            budget,
        });
    }
    let scaled = ScaledValues::new(config);
    let mut family = SubsetFamily::explicit(n, k);
    for combo in (1..=n).combinations(k) {
        if scaled.is_nonneg(&combo) {
            family.insert(KSubset::from_sorted(combo))?;
        }
    }
    Ok(NonnegCount {
        count: family.count().clone(),
        family,
    })
}

/// Whether `values[index]` plus the `k - 1` smallest other values is
/// non-negative. On a sorted configuration this is the same as every k-sum
/// through `index` being non-negative.
pub fn is_central(config: &Configuration, index: usize, k: usize) -> Result<bool, NumericsError> {
    let n = config.n();
    config.value(index)?;
    if k == 0 || k > n {
        return Err(NumericsError::InvalidK { n, k });
    }
    let mut acc = config.value(index)?.clone();
    let mut taken = 0;
    let mut i = n;
    while taken < k - 1 {
        if i != index {
            acc += &config.values()[i - 1];
            taken += 1;
        }
        i -= 1;
    }
    Ok(!acc.is_negative())
}

/// The configuration scaled by the lcm of its denominators, so that sign
/// tests on subset sums are integer additions. Falls back to big integers
/// when values do not fit comfortably in `i128`.
#[derive(Debug, Clone)]
pub(crate) enum ScaledValues {
    Small(Vec<i128>),
    Big(Vec<BigInt>),
}

impl ScaledValues {
    pub(crate) fn new(config: &Configuration) -> Self {
        let lcm = config
            .values()
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let big: Vec<BigInt> = config
            .values()
            .iter()
            .map(|v| v.numer() * (&lcm / v.denom()))
            .collect();
        // |sum| <= n * max|v| must stay within i128.
        let limit = BigInt::from(i128::MAX / (big.len() as i128 + 1));
        if big.iter().all(|v| v.abs() < limit) {
            ScaledValues::Small(big.iter().map(|v| v.to_i128().unwrap()).collect())
        } else {
            ScaledValues::Big(big)
        }
    }

    /// Compares the sums over two index lists (1-based).
    pub(crate) fn cmp_sums(&self, a: &[usize], b: &[usize]) -> std::cmp::Ordering {
        match self {
            ScaledValues::Small(v) => {
                let sa: i128 = a.iter().map(|&i| v[i - 1]).sum();
                let sb: i128 = b.iter().map(|&i| v[i - 1]).sum();
                sa.cmp(&sb)
            }
            ScaledValues::Big(v) => {
                let sa: BigInt = a.iter().map(|&i| &v[i - 1]).sum();
                let sb: BigInt = b.iter().map(|&i| &v[i - 1]).sum();
                sa.cmp(&sb)
            }
        }
    }

    /// `indices` are 1-based.
    pub(crate) fn is_nonneg(&self, indices: &[usize]) -> bool {
        match self {
            ScaledValues::Small(v) => indices.iter().map(|&i| v[i - 1]).sum::<i128>() >= 0,
            ScaledValues::Big(v) => {
                let s: BigInt = indices.iter().map(|&i| &v[i - 1]).sum();
                !s.is_negative()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rat, ratio};

    fn cfg(v: &[i64]) -> Configuration {
        Configuration::from_integers(v).unwrap()
    }

    fn ks(v: &[usize], n: usize) -> KSubset {
        KSubset::new(v.to_vec(), n).unwrap()
    }

    #[test]
    fn ksum_examples() {
        let c = cfg(&[3, 3, 3, -4, -4]);
        assert_eq!(ksum(&c, &ks(&[1, 2], 5)).unwrap(), rat(6));
        assert_eq!(ksum(&c, &ks(&[3, 4], 5)).unwrap(), rat(-1));
        assert_eq!(ksum(&c, &ks(&[1, 2, 3, 4, 5], 5)).unwrap(), c.total_sum());
        let short = cfg(&[1, 2]);
        assert!(ksum(&short, &ks(&[1, 3], 5)).is_err());
    }

    #[test]
    fn count_examples() {
        let mut star = vec![7];
        star.extend(std::iter::repeat_n(-1, 7));
        let r = count_nonneg_ksums(&cfg(&star), 3).unwrap();
        assert_eq!(r.count, BigUint::from(21u32));
        assert!(r.family.members().all(|s| s.contains(1)));

        let ones = cfg(&[1; 9]);
        for k in 1..=9 {
            let r = count_nonneg_ksums(&ones, k).unwrap();
            assert_eq!(r.count, binomial(9, k as i64));
        }

        let mut cx = vec![3; 7];
        cx.extend([-7, -7, -7]);
        let r = count_nonneg_ksums(&cfg(&cx), 3).unwrap();
        assert_eq!(r.count, BigUint::from(35u32));
    }

    #[test]
    fn zero_sums_count() {
        let r = count_nonneg_ksums(&cfg(&[1, -1]), 2).unwrap();
        assert_eq!(r.count, BigUint::one());
    }

    #[test]
    fn budget_and_k_errors() {
        let c = cfg(&[1; 30]);
        assert!(matches!(
            count_nonneg_ksums_with_budget(&c, 15, 1000),
            Err(NumericsError::BudgetExceeded { .. })
        ));
        assert!(count_nonneg_ksums(&c, 0).is_err());
        assert!(count_nonneg_ksums(&c, 31).is_err());
    }

    #[test]
    fn centrality_examples() {
        let star = cfg(&[7, -1, -1, -1, -1, -1, -1, -1]);
        for k in 1..=8 {
            assert!(is_central(&star, 1, k).unwrap());
        }
        let mut cx = vec![3; 7];
        cx.extend([-7, -7, -7]);
        assert!(!is_central(&cfg(&cx), 1, 3).unwrap());
        let ones = cfg(&[1; 6]);
        for i in 1..=6 {
            assert!(is_central(&ones, i, 4).unwrap());
        }
        assert!(is_central(&ones, 7, 2).is_err());
        // index inside the bottom block: the other k-1 smallest skip it
        let c = cfg(&[5, 1, -2, -3]);
        assert!(!is_central(&c, 4, 2).unwrap()); // -3 + -2
        assert!(is_central(&c, 1, 2).unwrap()); // 5 - 3
    }

    #[test]
    fn scaled_values_handle_fractions_and_huge_entries() {
        let c = Configuration::new(vec![ratio(1, 3), ratio(-1, 6), ratio(-1, 6)]).unwrap();
        let s = ScaledValues::new(&c);
        assert!(s.is_nonneg(&[1, 2, 3]));
        assert!(!s.is_nonneg(&[2, 3]));
        let huge = Rational::from_integer(BigInt::from(10).pow(60));
        let c = Configuration::new(vec![huge.clone(), -huge + rat(1), rat(-2)]).unwrap();
        let s = ScaledValues::new(&c);
        assert!(matches!(s, ScaledValues::Big(_)));
        assert!(s.is_nonneg(&[1, 2]));
        assert!(!s.is_nonneg(&[2, 3]));
    }
}
