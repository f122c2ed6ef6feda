use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use serde::Serialize;

use super::SolverError;
use crate::numerics::{KSubset, SubsetFamily};

/// An up-set of the dominance order on k-subsets of `[n]`, kept both as its
/// antichain of minimal elements and as the full up-closure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FilterFamily {
    pub n: usize,
    pub k: usize,
    pub minimal_elements: Vec<KSubset>,
    #[serde(skip)]
    pub implied_members: SubsetFamily,
    pub size: usize,
}

impl FilterFamily {
    /// Up-closure of `generators`.
    pub fn up_closure(n: usize, k: usize, generators: &[KSubset]) -> Result<Self, SolverError> {
        check_nk(n, k)?;
        let mut seen: BTreeSet<KSubset> = BTreeSet::new();
        let mut stack = Vec::new();
        for g in generators {
            if g.k() != k || g.max_index() > n {
                return Err(SolverError::BadSubset(format!("{g:?}")));
            }
            stack.push(g.clone());
        }
        while let Some(s) = stack.pop() {
            if seen.insert(s.clone()) {
                stack.extend(s.upper_covers());
            }
        }
        Ok(Self::from_set(n, k, seen))
    }

    /// The filter with exactly these members. Fails if they are not
    /// up-closed.
    pub fn from_family(family: &SubsetFamily) -> Result<Self, SolverError> {
        if !family.is_enumerated() {
            return Err(SolverError::BadSubset("counted family".to_string()));
        }
        if !family.is_up_closed() {
            return Err(SolverError::NotUpClosed);
        }
        Ok(Self::from_set(family.n(), family.k(), family.members().cloned().collect()))
    }

    /// All k-subsets of `[n]`.
    pub fn all(n: usize, k: usize) -> Result<Self, SolverError> {
        Self::up_closure(n, k, &[KSubset::from_sorted((n - k + 1..=n).collect())])
    }

    fn from_set(n: usize, k: usize, members: BTreeSet<KSubset>) -> Self {
        let mut family = SubsetFamily::explicit(n, k);
        for m in &members {
            family.insert(m.clone()).expect("validated subset");
        }
        let minimal_elements = family.minimal_elements();
        FilterFamily {
            n,
            k,
            minimal_elements,
            size: members.len(),
            implied_members: family,
        }
    }

    pub fn contains(&self, s: &KSubset) -> bool {
        self.implied_members.contains(s)
    }

    /// Non-members all of whose upper covers are members.
    pub fn maximal_nonmembers(&self) -> Vec<KSubset> {
        (1..=self.n)
            .combinations(self.k)
            .map(KSubset::from_sorted)
            .filter(|s| !self.contains(s) && s.upper_covers().iter().all(|u| self.contains(u)))
            .collect()
    }
}

fn check_nk(n: usize, k: usize) -> Result<(), SolverError> {
    if k == 0 || k > n {
        Err(SolverError::InvalidNk { n, k })
    } else {
        Ok(())
    }
}

/// The dominance poset on `[n]^(k)` in lexicographic order, which is a
/// linear extension: every upper cover precedes its lower cover.
pub(crate) struct Poset {
    pub sets: Vec<KSubset>,
    pub up: Vec<Vec<usize>>,
    pub down: Vec<Vec<usize>>,
    pub index: HashMap<KSubset, usize>,
}

impl Poset {
    pub fn new(n: usize, k: usize) -> Self {
        let sets: Vec<KSubset> = (1..=n).combinations(k).map(KSubset::from_sorted).collect();
        let index: HashMap<KSubset, usize> =
            sets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let up: Vec<Vec<usize>> = sets
            .iter()
            .map(|s| s.upper_covers().iter().map(|u| index[u]).collect())
            .collect();
        let mut down = vec![Vec::new(); sets.len()];
        for (i, us) in up.iter().enumerate() {
            for &u in us {
                debug_assert!(u < i);
                down[u].push(i);
            }
        }
        Poset { sets, up, down, index }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn minimal(&self, member: &[bool]) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| member[i] && self.down[i].iter().all(|&d| !member[d]))
            .collect()
    }

    pub fn maximal_nonmembers(&self, member: &[bool]) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| !member[i] && self.up[i].iter().all(|&u| member[u]))
            .collect()
    }
}
