use num_traits::Signed;
use rand::seq::index;
use num_bigint::{BigUint, RandBigInt};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::WitnessError;
use crate::numerics::{ksum, Configuration, KSubset, SubsetFamily};

/// Draws one member (sorted 1-based indices) of a sub-family.
pub(crate) type Sampler<'a> = Box<dyn Fn(&mut ChaCha8Rng) -> Vec<usize> + 'a>;

/// A sub-family known only by its size and a uniform sampler.
pub(crate) struct SampledPart<'a> {
    pub count: BigUint,
    pub sample: Sampler<'a>,
}

/// Re-sums every explicit member, or every recorded sample of a counted
/// family, in exact rational arithmetic. True iff none is negative.
///
/// The check is order-independent, so running it on `workers` threads gives
/// the same answer as running it on one.
pub fn certify_family(config: &Configuration, family: &SubsetFamily, workers: usize) -> bool {
    let items: Vec<&KSubset> = if family.is_enumerated() {
        family.members().collect()
    } else {
        family.samples().iter().collect()
    };
    let ok = |s: &&KSubset| matches!(ksum(config, s), Ok(v) if !v.is_negative());
    if workers == 1 || items.len() < 1024 {
        return items.iter().all(ok);
    }
    if workers == 0 {
        return items.par_iter().all(ok);
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| items.par_iter().all(ok)),
        Err(_) => items.iter().all(ok),
    }
}

/// Counted family over disjoint parts. Each sample picks a part with
/// probability proportional to its size, then a uniform member of it.
pub(crate) fn sample_parts(
    n: usize,
    k: usize,
    parts: &[SampledPart<'_>],
    sample_size: usize,
    seed: u64,
) -> SubsetFamily {
    let total: BigUint = parts.iter().map(|p| &p.count).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(sample_size);
    if total > BigUint::default() {
        for _ in 0..sample_size {
            let mut u = rng.gen_biguint_below(&total);
            for p in parts {
                if u < p.count {
                    samples.push(KSubset::from_unsorted((p.sample)(&mut rng)));
                    break;
                }
                u -= &p.count;
            }
        }
    }
    SubsetFamily::counted(n, k, total, samples)
}

pub(crate) fn certify_or_fail(
    config: &Configuration,
    family: &SubsetFamily,
    workers: usize,
) -> Result<(), WitnessError> {
    if certify_family(config, family, workers) {
        Ok(())
    } else {
        Err(WitnessError::Unsound(format!(
            "a witness of the {}-subset family has negative sum",
            family.k()
        )))
    }
}

/// Uniform `r`-subset of the index range `lo..=hi`, sorted.
pub(crate) fn sample_range<R: Rng>(rng: &mut R, lo: usize, hi: usize, r: usize) -> Vec<usize> {
    if r == 0 {
        return Vec::new();
    }
    let len = hi + 1 - lo;
    let mut v: Vec<usize> = index::sample(rng, len, r).into_iter().map(|i| i + lo).collect();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_negative_members() {
        let c = Configuration::from_integers(&[3, 1, -2, -5]).unwrap();
        let mut f = SubsetFamily::explicit(4, 2);
        f.insert(KSubset::new(vec![1, 2], 4).unwrap()).unwrap();
        f.insert(KSubset::new(vec![1, 3], 4).unwrap()).unwrap();
        assert!(certify_family(&c, &f, 1));
        f.insert(KSubset::new(vec![2, 3], 4).unwrap()).unwrap();
        assert!(!certify_family(&c, &f, 1));
        assert!(!certify_family(&c, &f, 4));

        let counted = SubsetFamily::counted(4, 2, 3u32.into(), vec![KSubset::new(vec![1, 4], 4).unwrap()]);
        assert!(!certify_family(&c, &counted, 1));
    }

    #[test]
    fn sampling_stays_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let v = sample_range(&mut rng, 5, 12, 3);
            assert_eq!(v.len(), 3);
            assert!(v.windows(2).all(|w| w[0] < w[1]));
            assert!(v.iter().all(|&x| (5..=12).contains(&x)));
        }
        assert!(sample_range(&mut rng, 1, 4, 0).is_empty());
        assert_eq!(sample_range(&mut rng, 1, 4, 4), vec![1, 2, 3, 4]);
    }

    #[test]
    fn parts_are_sampled_by_weight() {
        let parts = [
            SampledPart { count: 1u32.into(), sample: Box::new(|_| vec![1, 2]) },
            SampledPart { count: 99u32.into(), sample: Box::new(|_| vec![3, 4]) },
        ];
        let f = sample_parts(4, 2, &parts, 1000, 9);
        assert_eq!(f.count(), &BigUint::from(100u32));
        let low = f.samples().iter().filter(|s| s.contains(1)).count();
        assert!(low < 60, "{low}");
        assert_eq!(f.samples().len(), 1000);
        let g = sample_parts(4, 2, &parts, 1000, 9);
        assert_eq!(f.samples(), g.samples());
    }
}
