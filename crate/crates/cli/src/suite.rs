//! The one-shot reproduction suite behind `mms reproduce`.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use mms_core::bounds::{
    f_readings, propagate_equality, thm1_threshold, thm1_threshold_check, thm2_first_stage_binomial,
    thm2_stage_check,
};
use mms_core::constructions::{mms_counterexample, star_config};
use mms_core::numerics::ratio;
use mms_core::partition::{baranyai_partition, partition_lower_bound_witnesses, validate_partition};
use mms_core::solver::{exact_a_with, SolverOptions};
use mms_core::witness::{extract_thm1, extract_thm2, WitnessError, WitnessMode, WitnessOptions};
use mms_core::{binomial, count_nonneg_ksums, ksum, Configuration, Rational};
use num_bigint::BigUint;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub id: String,
    pub status: Status,
    pub lhs: String,
    pub rhs: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(id: impl Into<String>, ok: bool, lhs: impl ToString, rhs: impl ToString) -> Self {
        Check {
            id: id.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            detail: None,
        }
    }

    fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Deliberate faults for exercising the failure path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Binomial coefficients used as reference values come out one too big.
    Binomial,
}

impl std::str::FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "binomial" => Ok(Fault::Binomial),
            other => Err(format!("unknown fault {other:?}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    pub workers: usize,
    pub fault: Option<Fault>,
    /// Random configurations in the soundness check.
    pub soundness_configs: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 0,
            workers: 0,
            fault: None,
            soundness_configs: 1000,
        }
    }
}

struct Ctx<'a> {
    opts: &'a SuiteOptions,
}

impl Ctx<'_> {
    fn binom(&self, n: usize, k: usize) -> BigUint {
        let b = binomial(n as u64, k as i64);
        match self.opts.fault {
            Some(Fault::Binomial) => b + 1u32,
            None => b,
        }
    }

    fn solver(&self, workers: usize) -> SolverOptions {
        SolverOptions { workers, ..Default::default() }
    }
}

/// Runs every check in a fixed order. The result depends only on `seed`
/// and `fault`, never on `workers`.
pub fn run_suite(opts: &SuiteOptions) -> Vec<Check> {
    let ctx = Ctx { opts };
    let mut out = Vec::new();
    out.extend(multiple_of_k(&ctx));
    out.extend(exact_spot_values(&ctx));
    out.extend(counterexamples(&ctx));
    out.push(witness_soundness(&ctx));
    out.push(thm1_k2_guarantee(&ctx));
    out.extend(thm2_desk_scale(&ctx));
    out.extend(inequality_chains(&ctx));
    out.extend(propagation(&ctx));
    out.extend(oracle_equivalence(&ctx));
    out.push(worker_determinism(&ctx));
    out
}

pub const MULTIPLE_OF_K_CASES: [(usize, usize); 7] = [(4, 2), (6, 2), (8, 2), (6, 3), (9, 3), (8, 4), (10, 5)];

fn multiple_of_k(ctx: &Ctx) -> Vec<Check> {
    MULTIPLE_OF_K_CASES
        .iter()
        .map(|&(n, k)| {
            let id = format!("multiple_of_k/n{n}_k{k}");
            let target = ctx.binom(n - 1, k - 1);
            let star = star_config(n, k).expect("n >= k").config;
            let valid = baranyai_partition(n, k, ctx.opts.seed)
                .map(|p| validate_partition(&p).is_ok())
                .unwrap_or(false);
            let lower = partition_lower_bound_witnesses(&star, k).map(|f| f.count().clone());
            let upper = count_nonneg_ksums(&star, k).map(|r| r.count);
            match (lower, upper) {
                (Ok(lo), Ok(up)) => {
                    let ok = valid && lo == target && up == target;
                    Check::new(id, ok, &lo, &up).detail(format!("target {target}"))
                }
                _ => Check::new(id, false, "error", "error"),
            }
        })
        .collect()
}

fn exact_spot_values(ctx: &Ctx) -> Vec<Check> {
    [(4, 3u32), (5, 3), (6, 5), (7, 6)]
        .iter()
        .map(|&(n, expected)| {
            let id = format!("exact_a/n{n}_k2");
            match exact_a_with(n, 2, &ctx.solver(ctx.opts.workers)) {
                Ok(r) => {
                    let target = ctx.binom(n - 1, 1);
                    let equal_expected = n != 5;
                    let ok = r.exact
                        && r.a_value == BigUint::from(expected)
                        && (r.a_value == target) == equal_expected;
                    Check::new(id, ok, &r.a_value, expected).detail(format!("target {target}"))
                }
                Err(e) => Check::new(id, false, e, expected),
            }
        })
        .collect()
}

fn counterexamples(ctx: &Ctx) -> Vec<Check> {
    let mut out = Vec::new();
    for k in [3, 4, 5] {
        let c = mms_counterexample(k).expect("k >= 2");
        let count = count_nonneg_ksums(&c.config, k).map(|r| r.count).unwrap_or_default();
        let rhs = ctx.binom(3 * k, k - 1);
        let ok = count == ctx.binom(3 * k - 2, k) && count < rhs;
        out.push(Check::new(format!("counterexample/k{k}"), ok, &count, &rhs));
    }
    let c = mms_counterexample(2).expect("k >= 2");
    let count = count_nonneg_ksums(&c.config, 2).map(|r| r.count).unwrap_or_default();
    let target = ctx.binom(6, 1);
    out.push(Check::new("counterexample/k2_not_below", count >= target, &count, &target));
    out
}

/// A random configuration of size `n` with non-negative total. Half the
/// draws are uniform rationals; the other half have a few large negatives
/// so that the top element is often not central.
pub fn random_config(rng: &mut ChaCha8Rng, n: usize) -> Configuration {
    let mut values: Vec<Rational>;
    if rng.gen_bool(0.5) {
        values = (0..n)
            .map(|_| ratio(rng.gen_range(-30..=30), rng.gen_range(1..=4)))
            .collect();
        let total: Rational = values.iter().sum();
        if total.is_negative() {
            let imax = (0..n).max_by(|&a, &b| values[a].cmp(&values[b])).expect("n >= 1");
            values[imax] -= total;
        }
    } else {
        let negs = rng.gen_range(0..=n / 2);
        values = (0..n)
            .map(|i| {
                if i < negs {
                    ratio(-rng.gen_range(5..=40), rng.gen_range(1..=3))
                } else {
                    ratio(rng.gen_range(0..=6), rng.gen_range(1..=2))
                }
            })
            .collect();
        let mut i = negs;
        while i < n && values.iter().sum::<Rational>().is_negative() {
            values[i] += ratio(1, 1);
            i = if i + 1 == n { negs } else { i + 1 };
        }
        if values.iter().sum::<Rational>().is_negative() {
            let total: Rational = values.iter().sum();
            values[n - 1] -= total;
        }
    }
    Configuration::new(values).expect("n >= 1")
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Soundness {
    pub configs: usize,
    pub witnesses_checked: u64,
    pub violations: u64,
    pub errors: Vec<String>,
    pub branches: BTreeMap<String, usize>,
}

/// Re-sums every explicit witness from both extractors and the partition
/// bound on `count` seeded configurations with `n <= 40`, `k in {2,3,4}`.
pub fn soundness_sweep(count: usize, seed: u64, workers: usize) -> Soundness {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Soundness::default();
    let explicit = WitnessOptions { mode: WitnessMode::Explicit, workers, seed, ..Default::default() };
    for _ in 0..count {
        let k = rng.gen_range(2..=4);
        let n = rng.gen_range(2 * k + 1..=40);
        let c = random_config(&mut rng, n);
        s.configs += 1;
        let mut families = Vec::new();
        match extract_thm1(&c, k, &explicit) {
            Ok(r) => {
                *s.branches.entry(format!("thm1/{}", r.branch.as_str())).or_default() += 1;
                families.push(r.witnesses);
            }
            Err(e) => s.errors.push(format!("thm1 n={n} k={k}: {e}")),
        }
        if n >= 4 * k {
            match extract_thm2(&c, k, &explicit) {
                Ok(r) => {
                    *s.branches.entry(format!("thm2/{}", r.branch.as_str())).or_default() += 1;
                    families.push(r.witnesses);
                }
                Err(WitnessError::RangeInfeasible { .. }) => {
                    *s.branches.entry("thm2/range_infeasible".to_string()).or_default() += 1;
                }
                Err(e) => s.errors.push(format!("thm2 n={n} k={k}: {e}")),
            }
        }
        if n % k == 0 {
            match partition_lower_bound_witnesses(&c, k) {
                Ok(f) => families.push(f),
                Err(e) => s.errors.push(format!("partition n={n} k={k}: {e}")),
            }
        }
        for f in &families {
            for w in f.members() {
                s.witnesses_checked += 1;
                if ksum(&c, w).map_or(true, |v| v.is_negative()) {
                    s.violations += 1;
                }
            }
        }
    }
    s
}

fn witness_soundness(ctx: &Ctx) -> Check {
    let s = soundness_sweep(ctx.opts.soundness_configs, ctx.opts.seed, ctx.opts.workers);
    let ok = s.violations == 0 && s.errors.is_empty() && s.configs >= ctx.opts.soundness_configs;
    Check::new("witness_soundness", ok, s.violations, 0).detail(format!(
        "configs {} witnesses {} errors {}",
        s.configs,
        s.witnesses_checked,
        s.errors.len()
    ))
}

/// Configurations for the `k = 2` guarantee: the star, the mirror, a
/// no-central-top family and seeded random draws.
pub fn k2_configs(n: usize, seed: u64) -> Vec<Configuration> {
    let mut out = vec![
        star_config(n, 2).expect("n >= 2").config,
        mms_core::constructions::mirror_config(n, 2).expect("n >= 2").config,
    ];
    // Ones and six copies of -(n-6)/6: the top element is never central.
    let mut v = vec![ratio(1, 1); n - 6];
    v.extend(vec![ratio(-(n as i64 - 6), 6); 6]);
    out.push(Configuration::new(v).expect("n >= 7"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
    out.extend((0..6).map(|_| random_config(&mut rng, n)));
    out
}

fn thm1_k2_guarantee(ctx: &Ctx) -> Check {
    let mut worst: Option<(i128, usize)> = None;
    let mut ok = true;
    let opts = WitnessOptions { workers: ctx.opts.workers, ..Default::default() };
    for n in 32..=64 {
        let target = ctx.binom(n - 1, 1);
        for c in k2_configs(n, ctx.opts.seed) {
            match extract_thm1(&c, 2, &opts) {
                Ok(r) => {
                    let slack = i128::try_from(r.witnesses.count().clone()).unwrap_or(i128::MAX)
                        - i128::try_from(target.clone()).unwrap_or(i128::MAX);
                    ok &= r.certified && slack >= 0;
                    if worst.is_none_or(|(w, _)| slack < w) {
                        worst = Some((slack, n));
                    }
                }
                Err(_) => ok = false,
            }
        }
    }
    let (slack, n) = worst.unwrap_or((0, 0));
    Check::new("thm1_k2_guarantee", ok, slack, 0).detail(format!("smallest slack at n = {n}"))
}

/// `n - ⌊n/3⌋` ones and `⌊n/3⌋` equal negatives summing to zero: no stage
/// maximum is central at `k = 3`.
pub fn adversarial_k3(n: usize) -> Configuration {
    let neg = n / 3;
    let pos = n - neg;
    let mut v = vec![ratio(1, 1); pos];
    v.extend(vec![ratio(-(pos as i64), neg as i64); neg]);
    Configuration::new(v).expect("n >= 3")
}

/// [`adversarial_k3`] with seeded perturbations, re-balanced to a
/// non-negative total.
pub fn perturbed_k3(n: usize, seed: u64) -> Configuration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = adversarial_k3(n);
    let mut v: Vec<Rational> = base
        .values()
        .iter()
        .map(|x| {
            let d = ratio(rng.gen_range(0..=100), 1000);
            if x.is_negative() {
                x - d
            } else {
                x + d
            }
        })
        .collect();
    let total: Rational = v.iter().sum();
    if total.is_negative() {
        v[0] -= total;
    }
    Configuration::new(v).expect("n >= 1")
}

fn thm2_desk_scale(ctx: &Ctx) -> Vec<Check> {
    let n = 5200;
    let target = ctx.binom(n - 1, 2);
    let opts = WitnessOptions {
        mode: WitnessMode::Counted,
        sample_size: 1000,
        seed: ctx.opts.seed,
        workers: ctx.opts.workers,
    };
    let inputs = [
        ("star", star_config(n, 3).expect("valid").config),
        ("adversarial", adversarial_k3(n)),
        ("perturbed", perturbed_k3(n, ctx.opts.seed)),
    ];
    inputs
        .into_iter()
        .map(|(name, c)| {
            let id = format!("thm2_desk/{name}");
            match extract_thm2(&c, 3, &opts) {
                Ok(r) => {
                    let sampled = r.witnesses.samples().len();
                    let sound = r
                        .witnesses
                        .samples()
                        .iter()
                        .all(|s| ksum(&c, s).is_ok_and(|v| !v.is_negative()));
                    let ok = r.certified && sound && sampled == 1000 && r.guaranteed_count >= target;
                    Check::new(id, ok, &r.guaranteed_count, &target)
                        .detail(format!("branch {} samples {sampled}", r.branch.as_str()))
                }
                Err(e) => Check::new(id, false, e, &target),
            }
        })
        .collect()
}

fn inequality_chains(ctx: &Ctx) -> Vec<Check> {
    let mut out = Vec::new();
    let held = (2..=8)
        .filter(|&k| {
            let n = usize::try_from(thm1_threshold(k)).expect("small");
            thm1_threshold_check(n, k).is_ok_and(|r| r.all_hold())
        })
        .count();
    out.push(Check::new("inequality/thm1_threshold_k2_to_8", held == 7, held, 7));

    let (n, k) = (5200, 3);
    let max = n / (2 * k);
    let held = (1..=max)
        .filter(|&p| thm2_stage_check(n, k, p).is_ok_and(|r| r.holds && r.cross_check))
        .count();
    out.push(Check::new("inequality/thm2_stage_loop_n5200_k3", held == max, held, max));

    let mut held = 0;
    for n in 19..=100 {
        let lhs = BigUint::from(2u32) * ctx.binom(n - 4, 2);
        let rhs = ctx.binom(n - 1, 2);
        let ok = thm2_first_stage_binomial(n, 3).is_ok_and(|r| r.holds && r.cross_check);
        if ok && lhs > rhs {
            held += 1;
        }
    }
    out.push(Check::new("inequality/first_stage_binomial_k3", held == 82, held, 82));
    out
}

fn propagation(ctx: &Ctx) -> Vec<Check> {
    let p = propagate_equality(&BTreeSet::from([4, 7]), 2, 10);
    let mut disagreements = 0;
    let mut verdicts = BTreeMap::new();
    for n in 4..=10 {
        if let Ok(r) = exact_a_with(n, 2, &ctx.solver(ctx.opts.workers)) {
            let equal = r.exact && r.a_value == ctx.binom(n - 1, 1);
            verdicts.insert(n, equal);
            if p.closure.contains(&n) && !equal {
                disagreements += 1;
            }
        } else {
            disagreements += 1;
        }
    }
    let single = propagate_equality(&BTreeSet::from([7]), 2, 20);
    let readings = f_readings(2, &verdicts);
    vec![
        Check::new("propagation/closure_vs_exact", disagreements == 0, disagreements, 0)
            .detail(format!("closure {:?}", p.closure)),
        Check::new(
            "propagation/coprime_f2",
            single.f_upper_bound == Some(7),
            single.f_upper_bound.map_or("none".to_string(), |v| v.to_string()),
            7,
        ),
        Check::new(
            "propagation/f2_readings",
            readings.is_some_and(|r| r.f_at_least == 6 && r.n0_strict == 5),
            readings.map_or("none".to_string(), |r| format!("f>={} n0={}", r.f_at_least, r.n0_strict)),
            "f>=6 n0=5",
        ),
    ]
}

/// Minimum count of non-negative pair sums over sorted integer vectors in
/// `[-6, 6]^n` with non-negative total.
pub fn brute_force_min_k2(n: usize) -> usize {
    (-6i64..=6)
        .combinations_with_replacement(n)
        .filter(|v| v.iter().sum::<i64>() >= 0)
        .map(|v| v.iter().tuple_combinations().filter(|(a, b)| *a + *b >= 0).count())
        .min()
        .expect("zero vector qualifies")
}

fn oracle_equivalence(ctx: &Ctx) -> Vec<Check> {
    (2..=6)
        .map(|n| {
            let brute = brute_force_min_k2(n);
            let id = format!("oracle/n{n}_k2");
            match exact_a_with(n, 2, &ctx.solver(ctx.opts.workers)) {
                Ok(r) => Check::new(id, r.exact && r.a_value == BigUint::from(brute), &r.a_value, brute),
                Err(e) => Check::new(id, false, e, brute),
            }
        })
        .collect()
}

fn worker_determinism(ctx: &Ctx) -> Check {
    let a = exact_a_with(7, 2, &ctx.solver(1));
    let b = exact_a_with(7, 2, &ctx.solver(ctx.opts.workers.max(4)));
    let solver_same = match (a, b) {
        (Ok(a), Ok(b)) => a.a_value == b.a_value && a.optimal_config == b.optimal_config && a.nodes_explored == b.nodes_explored,
        _ => false,
    };
    let c = adversarial_k3(600);
    let opts = |workers| WitnessOptions {
        mode: WitnessMode::Counted,
        sample_size: 200,
        seed: ctx.opts.seed,
        workers,
    };
    let w1 = extract_thm2(&c, 3, &opts(1)).map(|r| r.witnesses.samples().to_vec());
    let w4 = extract_thm2(&c, 3, &opts(ctx.opts.workers.max(4))).map(|r| r.witnesses.samples().to_vec());
    let witness_same = matches!((&w1, &w4), (Ok(a), Ok(b)) if a == b);
    let same = solver_same && witness_same;
    let word = |b: bool| if b { "identical" } else { "different" };
    Check::new("determinism/workers", same, word(same), "identical")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_small() {
        assert_eq!(brute_force_min_k2(2), 1);
        assert_eq!(brute_force_min_k2(4), 3);
        assert_eq!(brute_force_min_k2(5), 3);
    }

    #[test]
    fn random_configs_have_nonnegative_total() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..60 {
            let c = random_config(&mut rng, n);
            assert!(!c.total_sum().is_negative());
            assert_eq!(c.n(), n);
        }
    }

    #[test]
    fn adversarial_inputs() {
        let c = adversarial_k3(5200);
        assert_eq!(c.total_sum(), Rational::default());
        let p = perturbed_k3(5200, 0);
        assert!(!p.total_sum().is_negative());
        assert_ne!(p, perturbed_k3(5200, 1));
    }
}
