use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_traits::Signed;
use rand::Rng;

use super::certify::{certify_or_fail, sample_parts, sample_range, SampledPart};
use super::{
    check_total, eq2_bound, wants_explicit, Branch, FamilyPart, StageTrace, WitnessError,
    WitnessOptions, WitnessReport,
};
use crate::bounds::interval::{ceil_k_over_ln, compare_with_thm2_threshold, floor_n_over_two_ln};
use crate::numerics::{binomial, Configuration, KSubset, Rational, ScaledValues, SubsetFamily};

/// Last original index of the stage-`i` working set
/// `X_i = {x_i, ..., x_{n-(i-1)(k-1)}}`.
fn stage_end(n: usize, k: usize, i: usize) -> usize {
    n - (i - 1) * (k - 1)
}

fn stage_indices(n: usize, k: usize, i: usize) -> Vec<usize> {
    let end = stage_end(n, k, i);
    let mut v = vec![i];
    v.extend(end + 2 - k..=end);
    v
}

fn check_stage(n: usize, k: usize, stage: usize) -> Result<usize, WitnessError> {
    if k < 2 || n < 4 * k {
        return Err(WitnessError::NTooSmall { n, min: 4 * k.max(2) });
    }
    let t = n / (2 * k);
    if stage == 0 || stage > t {
        return Err(WitnessError::StageOutOfRange { stage, max: t });
    }
    Ok(t)
}

/// `{x_j} ∪ S` for `j <= i` and `S` a `(k-1)`-subset of `X_i \ {x_i}`.
///
/// Each such set is at least `x_i` plus `k-1` members of `X_i \ {x_i}`,
/// which is non-negative when `x_i` is central in `X_i`. The smallest index
/// identifies `j`, so the `i C(|X_i| - 1, k - 1)` sets are distinct.
pub fn substitution_family(
    config: &Configuration,
    k: usize,
    stage: usize,
    opts: &WitnessOptions,
) -> Result<SubsetFamily, WitnessError> {
    let n = config.n();
    check_stage(n, k, stage)?;
    let scaled = ScaledValues::new(config);
    if !scaled.is_nonneg(&stage_indices(n, k, stage)) {
        return Err(WitnessError::NotCentral { stage });
    }
    let end = stage_end(n, k, stage);
    let size = end + 1 - stage;
    let count = BigUint::from(stage) * binomial(size as u64 - 1, k as i64 - 1);
    if wants_explicit(opts.mode, &count)? {
        let mut f = SubsetFamily::explicit(n, k);
        for combo in (stage + 1..=end).combinations(k - 1) {
            for j in 1..=stage {
                let mut v = Vec::with_capacity(k);
                v.push(j);
                v.extend(&combo);
                f.insert(KSubset::from_sorted(v))?;
            }
        }
        Ok(f)
    } else {
        let part = SampledPart {
            count,
            sample: Box::new(|rng| {
                let mut v = vec![rng.gen_range(1..=stage)];
                v.extend(sample_range(rng, stage + 1, end, k - 1));
                v
            }),
        };
        Ok(sample_parts(n, k, &[part], opts.sample_size, opts.seed))
    }
}

/// Walks the staged centrality test of the `k (4e ln k)^k` argument and
/// returns the certified witness family.
///
/// Stage `i = 1..=⌊n/2k⌋` tests whether `x_i` is central in `X_i`; the
/// first central stage yields [`substitution_family`]. Otherwise the
/// two-range family takes `a` indices from `[1, T]` and `k - a` from
/// `(T, T + J]`, `J = ⌊n / (2 ln k)⌋`, where `a` starts at `⌈k / ln k⌉` and
/// is raised until `a |X_T| >= k J`, which makes every such set
/// non-negative.
pub fn extract_thm2(
    config: &Configuration,
    k: usize,
    opts: &WitnessOptions,
) -> Result<WitnessReport, WitnessError> {
    let n = config.n();
    let t = check_stage(n, k, 1)?;
    check_total(config)?;
    let target = binomial(n as u64 - 1, k as i64 - 1);
    let mut parameters = BTreeMap::new();
    parameters.insert("stages".to_string(), t.to_string());

    let scaled = ScaledValues::new(config);
    let mut trace = Vec::new();
    let mut stage_sum = config.total_sum();
    let mut central_stage = None;
    for i in 1..=t {
        if stage_sum.is_negative() {
            return Err(WitnessError::Unsound(format!("working set {i} has negative sum")));
        }
        let idx = stage_indices(n, k, i);
        let central = scaled.is_nonneg(&idx);
        trace.push(StageTrace {
            stage_index: i,
            surviving_top: i,
            removed_bottom: (i - 1) * (k - 1),
            central,
            stage_set_size: n - (i - 1) * k,
        });
        if central {
            central_stage = Some(i);
            break;
        }
        for &j in &idx {
            stage_sum -= &config.values()[j - 1];
        }
    }

    let (branch, family, parts) = if let Some(i) = central_stage {
        parameters.insert("central_stage".to_string(), i.to_string());
        let family = substitution_family(config, k, i, opts)?;
        let parts = vec![FamilyPart { label: "substitution", count: family.count().clone() }];
        (Branch::CentralAtStage, family, parts)
    } else {
        two_range(config, k, t, opts, &mut parameters)?
    };

    certify_or_fail(config, &family, opts.workers)?;
    let guaranteed_count = parts.iter().map(|p| &p.count).sum();
    let in_range = compare_with_thm2_threshold(&BigInt::from(n), k as u64)
        .is_some_and(|o| o.is_gt());
    Ok(WitnessReport {
        theorem: 2,
        n,
        k,
        branch,
        witnesses: family,
        guaranteed_count,
        parts,
        trace,
        parameters,
        certified: true,
        target,
        in_theorem_range: in_range,
    })
}

/// `(T, J, a)` for the two-range family: `T = ⌊n/2k⌋`, `J = ⌊n/(2 ln k)⌋`
/// and the number `a` of picks from `[1, T]`. Requires `n >= 4k`, `k >= 2`.
pub fn two_range_parameters(n: usize, k: usize) -> (usize, usize, usize) {
    let t = n / (2 * k);
    let j = floor_n_over_two_ln(n as u64, k as u64) as usize;
    let size = n - (t - 1) * k;
    let mut a = (ceil_k_over_ln(k as u64) as usize).clamp(1, k);
    while a < k && a * size < k * j {
        a += 1;
    }
    (t, j, a)
}

type BranchOutput = (Branch, SubsetFamily, Vec<FamilyPart>);

fn two_range(
    config: &Configuration,
    k: usize,
    t: usize,
    opts: &WitnessOptions,
    parameters: &mut BTreeMap<String, String>,
) -> Result<BranchOutput, WitnessError> {
    let n = config.n();
    let (_, j, a) = two_range_parameters(n, k);
    let end = stage_end(n, k, t);
    parameters.insert("medium_range".to_string(), j.to_string());
    parameters.insert("top_picks".to_string(), a.to_string());
    if a < k {
        if t + j > end {
            return Err(WitnessError::RangeInfeasible { needed: t + j, available: end });
        }
        // x_T against x_{T+J} inside X_T.
        let xt = config.restrict(&(t..=end).collect::<Vec<_>>())?;
        let bound = eq2_bound(&xt, j)?;
        parameters.insert("top_lower_bound".to_string(), bound.to_string());
    } else if config.values()[t - 1] < Rational::default() {
        return Err(WitnessError::Unsound(format!("x_{t} is negative")));
    }

    let top = binomial(t as u64, a as i64);
    let medium = binomial(j as u64, (k - a) as i64);
    let count = &top * &medium;
    let family = if wants_explicit(opts.mode, &count)? {
        let mut f = SubsetFamily::explicit(n, k);
        for tops in (1..=t).combinations(a) {
            for mids in (t + 1..=t + j).combinations(k - a) {
                let mut v = tops.clone();
                v.extend(mids);
                f.insert(KSubset::from_sorted(v))?;
            }
        }
        f
    } else {
        let part = SampledPart {
            count: count.clone(),
            sample: Box::new(|rng| {
                let mut v = sample_range(rng, 1, t, a);
                v.extend(sample_range(rng, t + 1, t + j, k - a));
                v
            }),
        };
        sample_parts(n, k, &[part], opts.sample_size, opts.seed)
    };
    let parts = vec![
        FamilyPart { label: "two_range", count },
    ];
    Ok((Branch::TwoRangeFamily, family, parts))
}
