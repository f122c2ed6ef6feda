use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{Pow, Signed};
use rand::Rng;

use super::certify::{certify_or_fail, sample_parts, sample_range, SampledPart, Sampler};
use super::{
    check_total, eq2_bound, wants_explicit, Branch, FamilyPart, WitnessError, WitnessOptions,
    WitnessReport,
};
use crate::numerics::{binomial, is_central, Configuration, KSubset, ScaledValues, SubsetFamily};
use crate::partition::{
    baranyai_partition_cached, partition_lower_bound_witnesses, round_robin_witness,
};

/// `n >= 3k^{k+1} + k^3`.
pub(crate) fn thm1_in_range(n: usize, k: usize) -> bool {
    let kb = BigUint::from(k);
    let bound = BigUint::from(3u32) * Pow::pow(&kb, (k + 1) as u32) + Pow::pow(&kb, 3u32);
    BigUint::from(n) >= bound
}

/// Inserts `{prefix} ∪ S` for every `r`-subset `S` of `lo..=hi`.
fn insert_all(
    family: &mut SubsetFamily,
    prefix: &[usize],
    lo: usize,
    hi: usize,
    r: usize,
) -> Result<(), WitnessError> {
    for combo in (lo..=hi).combinations(r) {
        let mut v = prefix.to_vec();
        v.extend(combo);
        family.insert(KSubset::from_unsorted(v))?;
    }
    Ok(())
}

/// Walks the three cases of the `3k^{k+1} + k^3` argument on a sorted
/// configuration and returns the certified witness family.
///
/// Requires `n >= 2k + 1` and a non-negative total. Outside the argument's
/// range the family is still sound, but may fall short of `C(n-1, k-1)`;
/// [`WitnessReport::meets_target`] reports which.
pub fn extract_thm1(
    config: &Configuration,
    k: usize,
    opts: &WitnessOptions,
) -> Result<WitnessReport, WitnessError> {
    let n = config.n();
    if k == 0 || n < 2 * k + 1 {
        return Err(WitnessError::NTooSmall { n, min: 2 * k + 1 });
    }
    check_total(config)?;
    let target = binomial(n as u64 - 1, k as i64 - 1);
    let mut parameters = BTreeMap::new();
    let negatives = config.negative_count();
    parameters.insert("negatives".to_string(), negatives.to_string());

    let (branch, family, parts) = if is_central(config, 1, k)? {
        let count = binomial(n as u64 - 1, k as i64 - 1);
        let family = if wants_explicit(opts.mode, &count)? {
            let mut f = SubsetFamily::explicit(n, k);
            insert_all(&mut f, &[1], 2, n, k - 1)?;
            f
        } else {
            let part = SampledPart {
                count: count.clone(),
                sample: Box::new(|rng| {
                    let mut v = vec![1];
                    v.extend(sample_range(rng, 2, n, k - 1));
                    v
                }),
            };
            sample_parts(n, k, &[part], opts.sample_size, opts.seed)
        };
        let parts = vec![FamilyPart { label: "one_plus_any", count }];
        (Branch::CentralAtTop, family, parts)
    } else if negatives < 2 * k {
        let p = n - negatives;
        parameters.insert("nonnegative_prefix".to_string(), p.to_string());
        let count = binomial(p as u64, k as i64);
        let family = if wants_explicit(opts.mode, &count)? {
            let mut f = SubsetFamily::explicit(n, k);
            if p >= k {
                insert_all(&mut f, &[], 1, p, k)?;
            }
            f
        } else {
            let part = SampledPart {
                count: count.clone(),
                sample: Box::new(|rng| sample_range(rng, 1, p, k)),
            };
            sample_parts(n, k, &[part], opts.sample_size, opts.seed)
        };
        let parts = vec![FamilyPart { label: "nonnegative_prefix", count }];
        (Branch::FewNegatives, family, parts)
    } else {
        trim_and_partition(config, k, opts, &mut parameters)?
    };

    certify_or_fail(config, &family, opts.workers)?;
    let guaranteed_count = parts.iter().map(|p| &p.count).sum();
    Ok(WitnessReport {
        theorem: 1,
        n,
        k,
        branch,
        witnesses: family,
        guaranteed_count,
        parts,
        trace: Vec::new(),
        parameters,
        certified: true,
        target,
        in_theorem_range: thm1_in_range(n, k),
    })
}

type BranchOutput = (Branch, SubsetFamily, Vec<FamilyPart>);

fn trim_and_partition(
    config: &Configuration,
    k: usize,
    opts: &WitnessOptions,
    parameters: &mut BTreeMap<String, String>,
) -> Result<BranchOutput, WitnessError> {
    let n = config.n();
    let z = n / k;
    let m = k * (z - 1);
    parameters.insert("trimmed_size".to_string(), m.to_string());
    parameters.insert("top_zone".to_string(), z.to_string());

    // Dropping x_1 and the n-1-m smallest values removes a negative amount:
    // x_1 is not central and every dropped bottom value is negative.
    let kept: Vec<usize> = (2..=m + 1).collect();
    let trimmed = config.restrict(&kept)?;
    if trimmed.total_sum().is_negative() {
        return Err(WitnessError::Unsound(
            "trimmed configuration has negative total".to_string(),
        ));
    }
    eq2_bound(config, z)?;

    let part_count = binomial(m as u64 - 1, k as i64 - 1);
    let zone_count = binomial(z as u64, k as i64 - 1);
    let total = &part_count + &zone_count;
    let family = if wants_explicit(opts.mode, &total)? {
        let mut f = SubsetFamily::explicit(n, k);
        let witnesses = partition_lower_bound_witnesses(&trimmed, k)?;
        for w in witnesses.members() {
            f.insert(KSubset::from_sorted(w.indices().iter().map(|i| i + 1).collect()))?;
        }
        insert_all(&mut f, &[1], 2, z + 1, k - 1)?;
        f
    } else {
        let scaled = ScaledValues::new(&trimmed);
        let sampler: Sampler<'_> = if k == 2 {
            Box::new(move |rng| {
                let r = rng.gen_range(0..m - 1);
                shift(round_robin_witness(&scaled, m, r))
            })
        } else {
            let p = baranyai_partition_cached(m, k, 0)?;
            Box::new(move |rng| {
                let class = &p.classes[rng.gen_range(0..p.classes.len())];
                let mut best = &class.blocks[0];
                for b in &class.blocks[1..] {
                    if scaled.cmp_sums(b.indices(), best.indices()).is_gt() {
                        best = b;
                    }
                }
                shift(best.clone())
            })
        };
        let parts = [
            SampledPart { count: part_count.clone(), sample: sampler },
            SampledPart {
                count: zone_count.clone(),
                sample: Box::new(|rng| {
                    let mut v = vec![1];
                    v.extend(sample_range(rng, 2, z + 1, k - 1));
                    v
                }),
            },
        ];
        sample_parts(n, k, &parts, opts.sample_size, opts.seed)
    };
    let parts = vec![
        FamilyPart { label: "partition_witnesses", count: part_count },
        FamilyPart { label: "top_zone", count: zone_count },
    ];
    Ok((Branch::TrimAndPartitionPlusTopZone, family, parts))
}

fn shift(s: KSubset) -> Vec<usize> {
    s.indices().iter().map(|i| i + 1).collect()
}
