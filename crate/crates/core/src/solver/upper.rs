use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::SolverError;
use crate::numerics::{binomial, count_nonneg_ksums, Configuration, DEFAULT_ENUMERATION_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Every configuration with at most three distinct integer values in
    /// `[-V, V]`, `V = min(n, 12)`, counted in closed form.
    Grid,
    /// Seeded simulated annealing on integer vectors from the star
    /// configuration.
    Anneal,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grid" => Ok(Strategy::Grid),
            "anneal" => Ok(Strategy::Anneal),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperBound {
    pub count: BigUint,
    pub config: Configuration,
    pub strategy: Strategy,
}

const GRID_BOX: i64 = 12;
const ANNEAL_STEPS: usize = 3000;
const ANNEAL_RESTARTS: usize = 4;

/// A configuration with non-negative total and few non-negative k-sums;
/// its exact count bounds `A(n, k)` from above.
pub fn search_upper_bound(
    n: usize,
    k: usize,
    strategy: Strategy,
    seed: u64,
) -> Result<UpperBound, SolverError> {
    if k == 0 || k > n {
        return Err(SolverError::InvalidNk { n, k });
    }
    let needed = binomial(n as u64, k as i64) * BigUint::from(n);
    if needed > BigUint::from(DEFAULT_ENUMERATION_BUDGET) {
        return Err(SolverError::Numerics(crate::numerics::NumericsError::BudgetExceeded {
            needed: needed.to_string(),
            budget: DEFAULT_ENUMERATION_BUDGET,
        }));
    }
    let values = match strategy {
        Strategy::Grid => grid(n, k),
        Strategy::Anneal => anneal(n, k, seed),
    };
    let config = Configuration::from_integers(&values)?;
    let count = count_nonneg_ksums(&config, k)?.count;
    Ok(UpperBound { count, config, strategy })
}

fn binomial_table(n: usize, k: usize) -> Vec<Vec<u128>> {
    let mut t = vec![vec![0u128; k + 1]; n + 1];
    for (m, row) in t.iter_mut().enumerate() {
        for (i, v) in row.iter_mut().enumerate() {
            *v = u128::try_from(binomial(m as u64, i as i64)).expect("desk scale");
        }
    }
    t
}

/// Values `v_1 > v_2 > v_3` with multiplicities `m_1 + m_2 + m_3 = n`
/// (some possibly zero); the count is `Σ C(m_1,a) C(m_2,b) C(m_3,c)` over
/// `a + b + c = k` with `a v_1 + b v_2 + c v_3 >= 0`.
fn grid(n: usize, k: usize) -> Vec<i64> {
    let c = binomial_table(n, k);
    let bound = (n as i64).min(GRID_BOX);
    let mut best: Option<(u128, Vec<i64>)> = None;
    let splits: Vec<(usize, usize, usize)> = (0..=k)
        .flat_map(|a| (0..=k - a).map(move |b| (a, b, k - a - b)))
        .collect();
    for vals in (-bound..=bound).rev().combinations(3) {
        let (v1, v2, v3) = (vals[0], vals[1], vals[2]);
        for m1 in 1..=n {
            for m2 in 0..=n - m1 {
                let m3 = n - m1 - m2;
                if m1 as i64 * v1 + m2 as i64 * v2 + m3 as i64 * v3 < 0 {
                    continue;
                }
                let mut count = 0u128;
                for &(a, b, cc) in &splits {
                    if a > m1 || b > m2 || cc > m3 {
                        continue;
                    }
                    if a as i64 * v1 + b as i64 * v2 + cc as i64 * v3 >= 0 {
                        count += c[m1][a] * c[m2][b] * c[m3][cc];
                    }
                }
                if best.as_ref().is_none_or(|(bc, _)| count < *bc) {
                    let mut v = vec![v1; m1];
                    v.extend(std::iter::repeat_n(v2, m2));
                    v.extend(std::iter::repeat_n(v3, m3));
                    best = Some((count, v));
                }
            }
        }
    }
    best.expect("non-empty box").1
}

fn count_i64(values: &[i64], k: usize) -> usize {
    values.iter().combinations(k).filter(|c| c.iter().copied().sum::<i64>() >= 0).count()
}

fn anneal(n: usize, k: usize, seed: u64) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = n as i64;
    let mut start = vec![-1i64; n];
    start[0] = n as i64 - 1;
    let mut best = (count_i64(&start, k), start.clone());
    for _ in 0..ANNEAL_RESTARTS {
        let mut cur = best.1.clone();
        let mut cur_count = best.0;
        let mut total: i64 = cur.iter().sum();
        for step in 0..ANNEAL_STEPS {
            let temp = 2.0 * (1.0 - step as f64 / ANNEAL_STEPS as f64) + 1e-3;
            let i = rng.gen_range(0..n);
            let mut delta = rng.gen_range(-span..=span);
            if delta == 0 {
                delta = 1;
            }
            if total + delta < 0 {
                continue;
            }
            cur[i] += delta;
            let c = count_i64(&cur, k);
            let accept = c <= cur_count || rng.gen::<f64>() < (-((c - cur_count) as f64) / temp).exp();
            if accept {
                cur_count = c;
                total += delta;
                if c < best.0 {
                    best = (c, cur.clone());
                }
            } else {
                cur[i] -= delta;
            }
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_examples() {
        let r = search_upper_bound(10, 3, Strategy::Grid, 0).unwrap();
        assert!(r.count <= BigUint::from(35u32));
        assert_eq!(search_upper_bound(5, 2, Strategy::Grid, 0).unwrap().count, BigUint::from(3u32));
        assert_eq!(search_upper_bound(6, 2, Strategy::Grid, 0).unwrap().count, BigUint::from(5u32));
    }

    #[test]
    fn anneal_examples() {
        let r = search_upper_bound(6, 2, Strategy::Anneal, 1).unwrap();
        assert_eq!(r.count, BigUint::from(5u32));
        let r = search_upper_bound(5, 2, Strategy::Anneal, 1).unwrap();
        assert!(r.count <= BigUint::from(4u32));
        let again = search_upper_bound(5, 2, Strategy::Anneal, 1).unwrap();
        assert_eq!(r.config, again.config);
    }

    #[test]
    fn counted_config_is_valid() {
        for (n, k) in [(7, 2), (9, 3), (8, 4)] {
            let r = search_upper_bound(n, k, Strategy::Grid, 0).unwrap();
            assert!(r.config.total_sum() >= crate::numerics::rat(0));
            assert_eq!(r.config.n(), n);
        }
    }
}
