use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Propagation {
    pub k: usize,
    pub n_max: usize,
    pub closure: BTreeSet<usize>,
    /// Smallest verified `n` coprime to `k`, if any.
    pub coprime_n: Option<usize>,
    /// `(k-1) n` for that `n`: every `n' >= (k-1) n` is a multiple of `k`
    /// or `c n + b k` with `1 <= c <= k-1`, `b >= 0`.
    pub f_upper_bound: Option<usize>,
}

/// Closure of `verified` under `n -> n + k` and `n -> c n`, up to `n_max`.
pub fn propagate_equality(verified: &BTreeSet<usize>, k: usize, n_max: usize) -> Propagation {
    let mut closure = BTreeSet::new();
    let mut stack: Vec<usize> = verified.iter().copied().filter(|&n| n >= 1 && n <= n_max).collect();
    while let Some(n) = stack.pop() {
        if !closure.insert(n) {
            continue;
        }
        if n + k <= n_max {
            stack.push(n + k);
        }
        let mut c = 2;
        while c * n <= n_max {
            stack.push(c * n);
            c += 1;
        }
    }
    let coprime_n = verified.iter().copied().find(|&n| n > 0 && n.gcd(&k) == 1);
    Propagation {
        k,
        n_max,
        closure,
        coprime_n,
        f_upper_bound: coprime_n.map(|n| (k - 1) * n),
    }
}

/// The two conventions for the threshold: `A(n,k) = C(n-1,k-1)` for every
/// `n >= f_at_least`, equivalently for every `n > n0_strict`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FReadings {
    pub k: usize,
    pub f_at_least: usize,
    pub n0_strict: usize,
}

/// Reads both conventions off per-`n` verdicts (true = equality). Returns
/// `None` unless equality is proven from the candidate `f` onward: the
/// closure of the true verdicts and multiples of `k` must contain a full
/// residue system `f..f+k`.
pub fn f_readings(k: usize, verdicts: &BTreeMap<usize, bool>) -> Option<FReadings> {
    let last_fail = verdicts.iter().filter(|(_, &ok)| !ok).map(|(&n, _)| n).max().unwrap_or(0);
    let f = (last_fail + 1).max(k);
    let mut seeds: BTreeSet<usize> = verdicts.iter().filter(|(_, &ok)| ok).map(|(&n, _)| n).collect();
    seeds.insert(k);
    let reach = propagate_equality(&seeds, k, f + k);
    (f..f + k).all(|n| reach.closure.contains(&n)).then_some(FReadings {
        k,
        f_at_least: f,
        n0_strict: f - 1,
    })
}
