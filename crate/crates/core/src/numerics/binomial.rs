use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Binomial coefficient `C(n, k)`; zero when `k < 0` or `k > n`.
///
/// Uses the multiplicative formula with the smaller of `k` and `n - k`, so
/// every intermediate product is itself a binomial coefficient and each
/// division is exact.
pub fn binomial(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, k)` when it fits in a `u64`.
pub fn binomial_u64(n: u64, k: i64) -> Option<u64> {
    u64::try_from(binomial(n, k)).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal_row(n: usize) -> Vec<BigUint> {
        let mut row = vec![BigUint::one()];
        for _ in 0..n {
            let mut next = vec![BigUint::one(); row.len() + 1];
            for i in 1..row.len() {
                next[i] = &row[i - 1] + &row[i];
            }
            row = next;
        }
        row
    }

    #[test]
    fn small_values() {
        assert_eq!(binomial(9, 2), BigUint::from(36u32));
        for n in 0..20 {
            assert_eq!(binomial(n, 0), BigUint::one());
        }
        assert_eq!(binomial(13, 5), BigUint::from(1287u32));
        assert_eq!(binomial(5, -1), BigUint::zero());
        assert_eq!(binomial(5, 6), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
    }

    #[test]
    fn matches_pascal_triangle() {
        let row = pascal_row(13);
        assert_eq!(row[5], binomial(13, 5));
        for n in 0..=60u64 {
            let row = pascal_row(n as usize);
            for (k, v) in row.iter().enumerate() {
                assert_eq!(*v, binomial(n, k as i64), "C({n},{k})");
            }
        }
    }

    #[test]
    fn pascal_rule_up_to_200() {
        for n in 2..=200u64 {
            for k in 1..n as i64 {
                assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
            }
        }
    }

    #[test]
    fn large_inputs_are_exact() {
        // C(10^4, 2) and symmetry at a large n.
        assert_eq!(binomial(10_000, 2), BigUint::from(49_995_000u64));
        assert_eq!(binomial(10_000, 37), binomial(10_000, 10_000 - 37));
        assert_eq!(binomial_u64(5199, 2), Some(13_512_201));
    }
}
