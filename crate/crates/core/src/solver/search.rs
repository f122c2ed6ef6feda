use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use super::filter::{FilterFamily, Poset};
use super::lp::{certify_system, CertificateKind, Constraint, FeasibilityCertificate};
use super::{SolverError, SolverOptions};
use crate::constructions::star_config;
use crate::numerics::{binomial, count_nonneg_ksums, Configuration};

const CHUNK: usize = 256;
const CORE_CACHE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Serialize)]
pub struct SolverResult {
    pub n: usize,
    pub k: usize,
    /// Exact minimum when `exact`, otherwise the best upper bound found.
    pub a_value: BigUint,
    pub optimal_family: FilterFamily,
    pub optimal_config: Configuration,
    pub nodes_explored: u64,
    pub exact: bool,
    /// Every filter smaller than this was shown infeasible.
    pub lower_bound: BigUint,
    pub certificates_checked: u64,
}

/// Exact `A(n, k)` with default options and the given filter budget.
pub fn exact_a(n: usize, k: usize, budget: u64) -> Result<SolverResult, SolverError> {
    exact_a_with(n, k, &SolverOptions { budget, ..Default::default() })
}

/// Smallest realizable filter of `[n]^(k)`.
///
/// Filters are enumerated by size, starting at `C(n-1, k-1)` when `k | n`
/// (a parallel class sums to the total, so each of the `C(n-1, k-1)`
/// classes has a non-negative member) and at 1 otherwise, always
/// containing `{1..k}`. Each candidate is decided by an exact LP; a
/// Farkas core from an earlier candidate rules out later candidates that
/// contain its members and avoid its non-members without a new LP.
///
/// Candidates are decided in fixed-size chunks and the first feasible one
/// in enumeration order wins, so the result does not depend on `workers`.
pub fn exact_a_with(n: usize, k: usize, opts: &SolverOptions) -> Result<SolverResult, SolverError> {
    if k == 0 || k > n {
        return Err(SolverError::InvalidNk { n, k });
    }
    let total = binomial(n as u64, k as i64);
    if total > BigUint::from(opts.cap) {
        return Err(SolverError::OverCap { n, k, cap: opts.cap });
    }
    let poset = Poset::new(n, k);
    let target = binomial(n as u64 - 1, k as i64 - 1);
    let upper = usize::try_from(&target).expect("within cap");
    let start = if n.is_multiple_of(k) { upper } else { 1 };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| SolverError::Pool(e.to_string()))?;

    let mut search = Search {
        poset: &poset,
        n,
        cores: Vec::new(),
        chunk: Vec::new(),
        nodes: 0,
        checked: 0,
        budget: opts.budget,
        found: None,
        exhausted: false,
        pool: &pool,
        verify: opts.verify_certificates,
        failure: None,
    };
    let mut lower = start;
    for size in start..=upper {
        lower = size;
        let mut member = vec![false; poset.len()];
        member[0] = true;
        search.dfs(1, 1, size, &mut member);
        if search.found.is_none() && search.failure.is_none() {
            search.flush();
        }
        if let Some(msg) = search.failure.take() {
            return Err(SolverError::CertificateFailed(msg));
        }
        if search.found.is_some() || search.exhausted {
            break;
        }
    }

    let (a_value, family, config, exact) = match search.found.take() {
        Some((member, cert)) => {
            let gens: Vec<_> = poset.minimal(&member).into_iter().map(|i| poset.sets[i].clone()).collect();
            let family = FilterFamily::up_closure(n, k, &gens)?;
            let config = cert.witness_config.expect("feasible");
            (BigUint::from(family.size), family, config, true)
        }
        None => {
            let star = star_config(n, k).expect("valid n, k").config;
            let fam = count_nonneg_ksums(&star, k)?.family;
            (target.clone(), FilterFamily::from_family(&fam)?, star, false)
        }
    };
    Ok(SolverResult {
        n,
        k,
        a_value,
        optimal_family: family,
        optimal_config: config,
        nodes_explored: search.nodes,
        exact,
        lower_bound: BigUint::from(lower),
        certificates_checked: search.checked,
    })
}

type Core = (Vec<usize>, Vec<usize>);

struct Search<'a> {
    poset: &'a Poset,
    n: usize,
    cores: Vec<Core>,
    chunk: Vec<Vec<bool>>,
    nodes: u64,
    checked: u64,
    budget: u64,
    found: Option<(Vec<bool>, FeasibilityCertificate)>,
    exhausted: bool,
    pool: &'a rayon::ThreadPool,
    verify: bool,
    failure: Option<String>,
}

impl Search<'_> {
    fn done(&self) -> bool {
        self.found.is_some() || self.exhausted || self.failure.is_some()
    }

    /// Lexicographic DFS over filters of exactly `size` members. An element
    /// may join only if all its upper covers did, which keeps the set
    /// up-closed because upper covers come earlier in lex order.
    fn dfs(&mut self, pos: usize, count: usize, size: usize, member: &mut Vec<bool>) {
        if self.done() {
            return;
        }
        if count == size {
            self.emit(member);
            return;
        }
        if pos == member.len() || count + (member.len() - pos) < size {
            return;
        }
        if self.poset.up[pos].iter().all(|&u| member[u]) {
            member[pos] = true;
            self.dfs(pos + 1, count + 1, size, member);
            member[pos] = false;
        }
        self.dfs(pos + 1, count, size, member);
    }

    fn emit(&mut self, member: &[bool]) {
        if self.nodes >= self.budget {
            self.exhausted = true;
            return;
        }
        self.nodes += 1;
        self.chunk.push(member.to_vec());
        if self.chunk.len() == CHUNK {
            self.flush();
        }
    }

    fn flush(&mut self) {
        let chunk = std::mem::take(&mut self.chunk);
        let cores = &self.cores;
        let poset = self.poset;
        let n = self.n;
        let todo: Vec<(usize, &Vec<bool>)> = chunk
            .iter()
            .enumerate()
            .filter(|(_, m)| !cores.iter().any(|c| hits(c, m)))
            .collect();
        let results: Vec<(usize, FeasibilityCertificate)> = self.pool.install(|| {
            todo.par_iter()
                .map(|&(i, m)| (i, certify_system(n, constraints(poset, n, m))))
                .collect()
        });
        for (i, cert) in results {
            self.checked += 1;
            if self.verify && !cert.verify() {
                self.failure = Some(format!("certificate for candidate {i} does not re-check"));
                return;
            }
            match cert.kind {
                CertificateKind::Feasible => {
                    self.found = Some((chunk[i].clone(), cert));
                    return;
                }
                CertificateKind::Infeasible => {
                    if self.cores.len() < CORE_CACHE_LIMIT {
                        let (mem, non) = cert.core().expect("infeasible");
                        let idx = |v: Vec<_>| v.iter().map(|s| poset.index[s]).collect();
                        self.cores.push((idx(mem), idx(non)));
                    }
                }
            }
        }
    }
}

fn hits(core: &Core, member: &[bool]) -> bool {
    core.0.iter().all(|&i| member[i]) && core.1.iter().all(|&i| !member[i])
}

fn constraints(poset: &Poset, n: usize, member: &[bool]) -> Vec<Constraint> {
    let mut cons: Vec<Constraint> = (1..n).map(Constraint::Order).collect();
    cons.push(Constraint::Sum);
    cons.extend(poset.minimal(member).into_iter().map(|i| Constraint::Member(poset.sets[i].clone())));
    cons.extend(
        poset
            .maximal_nonmembers(member)
            .into_iter()
            .map(|i| Constraint::NonMember(poset.sets[i].clone())),
    );
    cons
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        for (n, k, a) in [(2, 2, 1), (3, 2, 1), (4, 2, 3), (5, 2, 3), (6, 2, 5), (7, 2, 6), (6, 3, 10)] {
            let r = exact_a(n, k, 1_000_000).unwrap();
            assert!(r.exact);
            assert_eq!(r.a_value, BigUint::from(a as u32), "A({n},{k})");
            let fam = count_nonneg_ksums(&r.optimal_config, k).unwrap();
            assert_eq!(fam.count, r.a_value);
            assert_eq!(
                fam.family.members().collect::<Vec<_>>(),
                r.optimal_family.implied_members.members().collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn workers_do_not_change_results() {
        let one = exact_a_with(8, 2, &SolverOptions { workers: 1, ..Default::default() }).unwrap();
        let four = exact_a_with(8, 2, &SolverOptions { workers: 4, ..Default::default() }).unwrap();
        assert_eq!(one.a_value, four.a_value);
        assert_eq!(one.optimal_config, four.optimal_config);
        assert_eq!(one.nodes_explored, four.nodes_explored);
    }

    #[test]
    fn budget_and_cap() {
        let r = exact_a(7, 2, 2).unwrap();
        assert!(!r.exact);
        assert_eq!(r.a_value, BigUint::from(6u32));
        assert!(matches!(exact_a(12, 4, 10), Err(SolverError::OverCap { .. })));
        assert!(matches!(exact_a(3, 4, 10), Err(SolverError::InvalidNk { .. })));
    }
}
