//! Parallel-class factorizations of `[n]^(k)` when `k | n`, and the lower
//! bound they give: each class partitions `[n]`, so its blocks sum to the
//! total and at least one block is non-negative.
//!
//! `k = 2` uses the circle method. For `k >= 3` the partition is built by
//! the element-by-element flow induction: after placing elements `1..s`,
//! every class is a list of `n/k` disjoint partial blocks and each subset
//! `S` of `[s]` occurs `C(n-s, k-|S|)` times over all classes. Adding
//! element `s+1` to one partial block per class is an integral flow
//! problem whose fractional version is feasible, so an integral one exists.

mod flow;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{binomial, Configuration, KSubset, ScaledValues, SubsetFamily};
use flow::FlowNetwork;

/// Largest `C(n, k)` accepted by [`baranyai_partition`].
pub const MAX_PARTITION_SUBSETS: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("k = {k} does not divide n = {n}")]
    NotDivisible { n: usize, k: usize },
    #[error("C({n},{k}) exceeds the partition size limit {limit}")]
    TooLarge { n: usize, k: usize, limit: u64 },
    #[error("configuration has negative total sum")]
    NegativeTotal,
    #[error("flow induction stalled at element {0}")]
    FlowStalled(usize),
}

/// `n/k` pairwise disjoint blocks covering `[n]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParallelClass {
    pub blocks: Vec<KSubset>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaranyaiPartition {
    pub n: usize,
    pub k: usize,
    pub classes: Vec<ParallelClass>,
}

/// First violated condition found by [`validate_partition`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionDefect {
    #[error("k = {k} does not divide n = {n}")]
    NotDivisible { n: usize, k: usize },
    #[error("expected {expected} classes, found {found}")]
    ClassCount { expected: String, found: usize },
    #[error("class {class} has {found} blocks, expected {expected}")]
    BlockCount { class: usize, found: usize, expected: usize },
    #[error("class {class}: block {block:?} is not a valid {k}-subset of [{n}]")]
    BadBlock { class: usize, block: Vec<usize>, n: usize, k: usize },
    #[error("class {class} does not partition [n]: element {element} repeated or missing")]
    NotAPartition { class: usize, element: usize },
    #[error("block {block} appears in more than one class (again in class {class})")]
    DuplicateBlock { block: KSubset, class: usize },
}

impl BaranyaiPartition {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

/// Builds a partition of `[n]^(k)` into `C(n-1, k-1)` parallel classes.
///
/// Seed 0 keeps the natural labelling; other seeds relabel `[n]` by a
/// seeded permutation. Output is a deterministic function of `(n, k, seed)`.
pub fn baranyai_partition(n: usize, k: usize, seed: u64) -> Result<BaranyaiPartition, PartitionError> {
    if k == 0 || n == 0 || !n.is_multiple_of(k) {
        return Err(PartitionError::NotDivisible { n, k });
    }
    let total = binomial(n as u64, k as i64);
    if total > MAX_PARTITION_SUBSETS.into() {
        return Err(PartitionError::TooLarge {
            n,
            k,
            limit: MAX_PARTITION_SUBSETS,
        });
    }
    let raw: Vec<Vec<Vec<usize>>> = if k == 2 {
        round_robin(n)
    } else if k == n {
        vec![vec![(1..=n).collect()]]
    } else {
        flow_induction(n, k)?
    };

    let mut labels: Vec<usize> = (0..=n).collect();
    if seed != 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        labels[1..].shuffle(&mut rng);
    }
    let mut classes: Vec<ParallelClass> = raw
        .into_iter()
        .map(|blocks| {
            let mut blocks: Vec<KSubset> = blocks
                .into_iter()
                .map(|b| KSubset::from_unsorted(b.into_iter().map(|x| labels[x]).collect()))
                .collect();
            blocks.sort();
            ParallelClass { blocks }
        })
        .collect();
    classes.sort_by(|a, b| a.blocks.cmp(&b.blocks));
    Ok(BaranyaiPartition { n, k, classes })
}

/// Process-wide memo of [`baranyai_partition`] results.
pub fn baranyai_partition_cached(
    n: usize,
    k: usize,
    seed: u64,
) -> Result<Arc<BaranyaiPartition>, PartitionError> {
    type Cache = Mutex<HashMap<(usize, usize, u64), Arc<BaranyaiPartition>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&(n, k, seed)) {
        return Ok(Arc::clone(p));
    }
    let p = Arc::new(baranyai_partition(n, k, seed)?);
    cache
        .lock()
        .unwrap()
        .insert((n, k, seed), Arc::clone(&p));
    Ok(p)
}

/// Circle method: fix vertex `n`, rotate the others.
fn round_robin(n: usize) -> Vec<Vec<Vec<usize>>> {
    let m = n - 1;
    (0..m)
        .map(|r| {
            let mut class = vec![vec![r + 1, n]];
            for i in 1..n / 2 {
                let a = (r + i) % m + 1;
                let b = (r + m - i) % m + 1;
                class.push(vec![a.min(b), a.max(b)]);
            }
            class
        })
        .collect()
}

/// Round-robin class `r` (0-based) of `[n]^(2)` without building the rest.
pub(crate) fn round_robin_class(n: usize, r: usize) -> Vec<KSubset> {
    let m = n - 1;
    let mut class = vec![KSubset::from_sorted(vec![r + 1, n])];
    for i in 1..n / 2 {
        let a = (r + i) % m + 1;
        let b = (r + m - i) % m + 1;
        class.push(KSubset::from_sorted(vec![a.min(b), a.max(b)]));
    }
    class
}

fn flow_induction(n: usize, k: usize) -> Result<Vec<Vec<Vec<usize>>>, PartitionError> {
    let parts_per_class = n / k;
    let m = binomial(n as u64 - 1, k as i64 - 1);
    let m = usize::try_from(m).expect("bounded by the size limit");
    let mut classes: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); parts_per_class]; m];

    for element in 1..=n {
        let placed = element - 1;
        // Distinct partial blocks that may still grow.
        let mut set_ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut set_list: Vec<Vec<usize>> = Vec::new();
        for class in &classes {
            for part in class {
                if part.len() < k && !set_ids.contains_key(part) {
                    set_ids.insert(part.clone(), set_list.len());
                    set_list.push(part.clone());
                }
            }
        }
        let source = 0;
        let sink = 1;
        let class_node = |c: usize| 2 + c;
        let set_node = |s: usize| 2 + m + s;
        let mut g = FlowNetwork::new(2 + m + set_list.len());
        let mut class_edges: Vec<Vec<(usize, usize)>> = Vec::with_capacity(m);
        for (c, class) in classes.iter().enumerate() {
            g.add_edge(source, class_node(c), 1);
            let mut mult: Vec<(usize, u64)> = Vec::new();
            for part in class {
                if let Some(&sid) = set_ids.get(part) {
                    match mult.iter_mut().find(|(s, _)| *s == sid) {
                        Some((_, cnt)) => *cnt += 1,
                        None => mult.push((sid, 1)),
                    }
                }
            }
            class_edges.push(
                mult.into_iter()
                    .map(|(sid, cnt)| (sid, g.add_edge(class_node(c), set_node(sid), cnt)))
                    .collect(),
            );
        }
        for (sid, set) in set_list.iter().enumerate() {
            let demand = binomial((n - placed - 1) as u64, k as i64 - set.len() as i64 - 1);
            let demand = u64::try_from(demand).expect("bounded by the size limit");
            if demand > 0 {
                g.add_edge(set_node(sid), sink, demand);
            }
        }
        if g.max_flow(source, sink) != m as u64 {
            return Err(PartitionError::FlowStalled(element));
        }
        for (c, edges) in class_edges.iter().enumerate() {
            let (sid, _) = edges
                .iter()
                .find(|(_, e)| g.flow_on(*e) > 0)
                .ok_or(PartitionError::FlowStalled(element))?;
            let target = &set_list[*sid];
            let part = classes[c]
                .iter_mut()
                .find(|p| *p == target)
                .expect("set came from this class");
            part.push(element);
        }
    }
    Ok(classes)
}

/// Checks every structural invariant of a partition exhaustively.
pub fn validate_partition(p: &BaranyaiPartition) -> Result<(), PartitionDefect> {
    let (n, k) = (p.n, p.k);
    if k == 0 || n == 0 || n % k != 0 {
        return Err(PartitionDefect::NotDivisible { n, k });
    }
    let expected = binomial(n as u64 - 1, k as i64 - 1);
    if expected != p.classes.len().into() {
        return Err(PartitionDefect::ClassCount {
            expected: expected.to_string(),
            found: p.classes.len(),
        });
    }
    let mut seen: BTreeSet<&KSubset> = BTreeSet::new();
    for (ci, class) in p.classes.iter().enumerate() {
        if class.blocks.len() != n / k {
            return Err(PartitionDefect::BlockCount {
                class: ci,
                found: class.blocks.len(),
                expected: n / k,
            });
        }
        let mut covered = vec![false; n + 1];
        for block in &class.blocks {
            let idx = block.indices();
            if idx.len() != k || KSubset::new(idx.to_vec(), n).is_err() {
                return Err(PartitionDefect::BadBlock {
                    class: ci,
                    block: idx.to_vec(),
                    n,
                    k,
                });
            }
            for &x in idx {
                if covered[x] {
                    return Err(PartitionDefect::NotAPartition { class: ci, element: x });
                }
                covered[x] = true;
            }
            if !seen.insert(block) {
                return Err(PartitionDefect::DuplicateBlock {
                    block: block.clone(),
                    class: ci,
                });
            }
        }
        if let Some(x) = (1..=n).find(|&x| !covered[x]) {
            return Err(PartitionDefect::NotAPartition { class: ci, element: x });
        }
    }
    // C(n-1,k-1) classes of n/k distinct blocks: C(n,k) distinct k-subsets,
    // so the union is all of [n]^(k).
    Ok(())
}

pub fn is_valid_partition(p: &BaranyaiPartition) -> bool {
    validate_partition(p).is_ok()
}

/// Index of the maximum-sum block; ties go to the lexicographically
/// smallest block.
fn best_block(scaled: &ScaledValues, blocks: &[KSubset]) -> usize {
    let mut best = 0;
    for i in 1..blocks.len() {
        let ord = scaled.cmp_sums(blocks[i].indices(), blocks[best].indices());
        if ord.is_gt() || (ord.is_eq() && blocks[i] < blocks[best]) {
            best = i;
        }
    }
    best
}

/// One witness per parallel class: the maximum-sum block of each class.
/// Classes are disjoint, so the `C(n-1, k-1)` witnesses are distinct, and
/// each is non-negative because its class sums to the total.
pub fn partition_lower_bound_witnesses(
    config: &Configuration,
    k: usize,
) -> Result<SubsetFamily, PartitionError> {
    let n = config.n();
    if k == 0 || !n.is_multiple_of(k) {
        return Err(PartitionError::NotDivisible { n, k });
    }
    if config.total_sum().is_negative() {
        return Err(PartitionError::NegativeTotal);
    }
    let p = baranyai_partition_cached(n, k, 0)?;
    let scaled = ScaledValues::new(config);
    let mut family = SubsetFamily::explicit(n, k);
    for class in &p.classes {
        let b = best_block(&scaled, &class.blocks);
        family
            .insert(class.blocks[b].clone())
            .expect("partition blocks are valid");
    }
    Ok(family)
}

/// The maximum-sum block of round-robin class `r` of `[n]^(2)`.
pub(crate) fn round_robin_witness(scaled: &ScaledValues, n: usize, r: usize) -> KSubset {
    let blocks = round_robin_class(n, r);
    let b = best_block(scaled, &blocks);
    blocks[b].clone()
}

impl fmt::Display for BaranyaiPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for class in &self.classes {
            let blocks: Vec<String> = class.blocks.iter().map(|b| b.to_string()).collect();
            writeln!(f, "{}", blocks.join(" "))?;
        }
        Ok(())
    }
}
