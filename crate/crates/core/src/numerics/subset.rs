use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::NumericsError;

/// A k-element index set into a configuration of size `n`, stored as a
/// strictly increasing sequence of 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KSubset(Vec<usize>);

impl KSubset {
    /// Validates `1 <= indices[0] < ... < indices[k-1] <= n`.
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self, NumericsError> {
        if indices.is_empty() {
            return Err(NumericsError::InvalidK { n, k: 0 });
        }
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(NumericsError::NotIncreasing(indices));
            }
        }
        if indices[0] == 0 {
            return Err(NumericsError::IndexOutOfRange { index: 0, n });
        }
        let last = *indices.last().unwrap();
        if last > n {
            return Err(NumericsError::IndexOutOfRange { index: last, n });
        }
        Ok(KSubset(indices))
    }

    /// Sorts and wraps without range validation. Callers guarantee distinct,
    /// positive indices.
    pub(crate) fn from_unsorted(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        KSubset(indices)
    }

    pub(crate) fn from_sorted(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        KSubset(indices)
    }

    /// The top subset `{1, ..., k}`.
    pub fn top(k: usize) -> Self {
        KSubset((1..=k).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    pub fn max_index(&self) -> usize {
        *self.0.last().unwrap()
    }

    /// Subsets covering `self` from above in the dominance order: one index
    /// decreased by one, staying strictly increasing and positive.
    pub fn upper_covers(&self) -> Vec<KSubset> {
        let mut out = Vec::new();
        for i in 0..self.0.len() {
            let floor = if i == 0 { 1 } else { self.0[i - 1] + 1 };
            if self.0[i] > floor {
                let mut v = self.0.clone();
                v[i] -= 1;
                out.push(KSubset(v));
            }
        }
        out
    }

    /// Subsets covered by `self`: one index increased by one, staying
    /// strictly increasing and at most `n`.
    pub fn lower_covers(&self, n: usize) -> Vec<KSubset> {
        let mut out = Vec::new();
        let k = self.0.len();
        for i in 0..k {
            let ceil = if i + 1 == k { n } else { self.0[i + 1] - 1 };
            if self.0[i] < ceil {
                let mut v = self.0.clone();
                v[i] += 1;
                out.push(KSubset(v));
            }
        }
        out
    }
}

impl fmt::Display for KSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// Gale (dominance) order: `a` dominates `b` iff `a[i] <= b[i]` for every
/// position. On a sorted configuration this forces `ksum(a) >= ksum(b)`.
pub fn gale_dominates(a: &KSubset, b: &KSubset) -> Result<bool, NumericsError> {
    if a.k() != b.k() {
        return Err(NumericsError::Mismatched {
            left: a.k(),
            right: b.k(),
        });
    }
    Ok(a.0.iter().zip(&b.0).all(|(x, y)| x <= y))
}

/// A family of k-subsets of `[n]`.
///
/// Explicit families enumerate their members. Counted families carry only an
/// exact cardinality plus a list of sampled members that were checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetFamily {
    n: usize,
    k: usize,
    members: BTreeSet<KSubset>,
    count: BigUint,
    enumerated: bool,
    samples: Vec<KSubset>,
}

impl SubsetFamily {
    pub fn explicit(n: usize, k: usize) -> Self {
        SubsetFamily {
            n,
            k,
            members: BTreeSet::new(),
            count: BigUint::default(),
            enumerated: true,
            samples: Vec::new(),
        }
    }

    pub fn counted(n: usize, k: usize, count: BigUint, samples: Vec<KSubset>) -> Self {
        SubsetFamily {
            n,
            k,
            members: BTreeSet::new(),
            count,
            enumerated: false,
            samples,
        }
    }

    /// Inserts a member; returns `false` if it was already present.
    pub fn insert(&mut self, s: KSubset) -> Result<bool, NumericsError> {
        if s.k() != self.k {
            return Err(NumericsError::Mismatched {
                left: self.k,
                right: s.k(),
            });
        }
        if s.max_index() > self.n {
            return Err(NumericsError::IndexOutOfRange {
                index: s.max_index(),
                n: self.n,
            });
        }
        assert!(self.enumerated, "insert into a counted family");
        let fresh = self.members.insert(s);
        if fresh {
            self.count += 1u32;
        }
        Ok(fresh)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn count(&self) -> &BigUint {
        &self.count
    }

    pub fn is_enumerated(&self) -> bool {
        self.enumerated
    }

    pub fn contains(&self, s: &KSubset) -> bool {
        self.members.contains(s)
    }

    /// Members in lexicographic order (empty for counted families).
    pub fn members(&self) -> impl Iterator<Item = &KSubset> {
        self.members.iter()
    }

    pub fn samples(&self) -> &[KSubset] {
        &self.samples
    }

    /// Members none of whose lower covers are members. For an up-closed
    /// family these generate it.
    pub fn minimal_elements(&self) -> Vec<KSubset> {
        self.members
            .iter()
            .filter(|s| s.lower_covers(self.n).iter().all(|c| !self.members.contains(c)))
            .cloned()
            .collect()
    }

    /// True when every member's upper covers are members too.
    pub fn is_up_closed(&self) -> bool {
        self.members
            .iter()
            .all(|s| s.upper_covers().iter().all(|c| self.members.contains(c)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ks(v: &[usize]) -> KSubset {
        KSubset::new(v.to_vec(), 10).unwrap()
    }

    #[test]
    fn validation() {
        assert!(KSubset::new(vec![1, 1], 3).is_err());
        assert!(KSubset::new(vec![2, 1], 3).is_err());
        assert!(KSubset::new(vec![0, 1], 3).is_err());
        assert!(KSubset::new(vec![1, 4], 3).is_err());
        assert!(KSubset::new(vec![], 3).is_err());
        assert!(KSubset::new(vec![1, 3], 3).is_ok());
    }

    #[test]
    fn dominance_examples() {
        assert!(gale_dominates(&ks(&[1, 2, 3]), &ks(&[2, 4, 5])).unwrap());
        assert!(gale_dominates(&ks(&[2, 4, 5]), &ks(&[2, 4, 5])).unwrap());
        assert!(!gale_dominates(&ks(&[1, 4]), &ks(&[2, 3])).unwrap());
        assert!(gale_dominates(&ks(&[1, 4]), &ks(&[1, 2, 3])).is_err());
    }

    #[test]
    fn covers_are_one_step() {
        let s = ks(&[2, 3, 7]);
        let up = s.upper_covers();
        assert_eq!(up, vec![ks(&[1, 3, 7]), ks(&[2, 3, 6])]);
        let down = s.lower_covers(8);
        assert_eq!(down, vec![ks(&[2, 4, 7]), ks(&[2, 3, 8])]);
        assert!(KSubset::top(3).upper_covers().is_empty());
        assert!(ks(&[6, 7, 8]).lower_covers(8).is_empty());
    }

    #[test]
    fn family_counts_distinct_members() {
        let mut f = SubsetFamily::explicit(4, 2);
        assert!(f.insert(KSubset::new(vec![1, 2], 4).unwrap()).unwrap());
        assert!(!f.insert(KSubset::new(vec![1, 2], 4).unwrap()).unwrap());
        assert!(f.insert(KSubset::new(vec![1, 3], 4).unwrap()).unwrap());
        assert!(f.insert(KSubset::new(vec![1, 2, 3], 4).unwrap()).is_err());
        assert_eq!(f.count(), &BigUint::from(2u32));
        assert!(f.is_up_closed());
        assert_eq!(f.minimal_elements(), vec![KSubset::new(vec![1, 3], 4).unwrap()]);
    }
}
