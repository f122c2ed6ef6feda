use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::filter::FilterFamily;
use super::simplex::find_nonneg_solution;
use crate::numerics::{Configuration, KSubset, Rational};

/// One linear constraint `a . x >= c` on `x_1, ..., x_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// `x_i >= x_{i+1}`.
    Order(usize),
    /// `x_1 + ... + x_n >= 0`.
    Sum,
    /// `sum over A >= 0`.
    Member(KSubset),
    /// `sum over B <= -1`.
    NonMember(KSubset),
}

impl Constraint {
    pub fn coefficients(&self, n: usize) -> Vec<Rational> {
        let mut a = vec![Rational::zero(); n];
        match self {
            Constraint::Order(i) => {
                a[i - 1] = Rational::one();
                a[*i] = -Rational::one();
            }
            Constraint::Sum => a.iter_mut().for_each(|v| *v = Rational::one()),
            Constraint::Member(s) => s.indices().iter().for_each(|&i| a[i - 1] = Rational::one()),
            Constraint::NonMember(s) => {
                s.indices().iter().for_each(|&i| a[i - 1] = -Rational::one())
            }
        }
        a
    }

    pub fn rhs(&self) -> Rational {
        match self {
            Constraint::NonMember(_) => Rational::one(),
            _ => Rational::zero(),
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Order(i) => write!(f, "x{i} >= x{}", i + 1),
            Constraint::Sum => write!(f, "sum >= 0"),
            Constraint::Member(s) => write!(f, "{:?} >= 0", s.indices()),
            Constraint::NonMember(s) => write!(f, "{:?} <= -1", s.indices()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Feasible,
    Infeasible,
}

/// Either a configuration meeting every constraint, or non-negative
/// multipliers `λ` with `Σ λ_j a_j = 0` and `Σ λ_j c_j = 1`, so that summing
/// the constraints gives `0 >= 1`.
#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityCertificate {
    pub kind: CertificateKind,
    pub n: usize,
    pub constraints: Vec<Constraint>,
    pub witness_config: Option<Configuration>,
    pub farkas_multipliers: Option<Vec<Rational>>,
}

impl FeasibilityCertificate {
    /// Exact re-check of the certificate against its constraint list.
    pub fn verify(&self) -> bool {
        let n = self.n;
        match self.kind {
            CertificateKind::Feasible => {
                let Some(c) = &self.witness_config else { return false };
                if c.n() != n {
                    return false;
                }
                let x = c.values();
                self.constraints.iter().all(|con| {
                    let lhs: Rational =
                        con.coefficients(n).iter().zip(x).map(|(a, v)| a * v).sum();
                    lhs >= con.rhs()
                })
            }
            CertificateKind::Infeasible => {
                let Some(mu) = &self.farkas_multipliers else { return false };
                if mu.len() != self.constraints.len() || mu.iter().any(|m| m.is_negative()) {
                    return false;
                }
                let mut comb = vec![Rational::zero(); n];
                let mut rhs = Rational::zero();
                for (m, con) in mu.iter().zip(&self.constraints) {
                    for (acc, a) in comb.iter_mut().zip(con.coefficients(n)) {
                        *acc += m * a;
                    }
                    rhs += m * con.rhs();
                }
                comb.iter().all(Zero::is_zero) && rhs.is_positive()
            }
        }
    }

    /// Members and non-members whose constraints carry positive weight in
    /// an infeasibility certificate. Any filter containing all these members
    /// and none of these non-members is infeasible too.
    pub fn core(&self) -> Option<(Vec<KSubset>, Vec<KSubset>)> {
        let mu = self.farkas_multipliers.as_ref()?;
        let mut members = Vec::new();
        let mut nonmembers = Vec::new();
        for (m, con) in mu.iter().zip(&self.constraints) {
            if m.is_zero() {
                continue;
            }
            match con {
                Constraint::Member(s) => members.push(s.clone()),
                Constraint::NonMember(s) => nonmembers.push(s.clone()),
                _ => {}
            }
        }
        Some((members, nonmembers))
    }
}

/// The constraint system of a filter: order, total, minimal members and
/// maximal non-members. Other members and non-members follow by
/// monotonicity.
pub fn filter_constraints(filter: &FilterFamily) -> Vec<Constraint> {
    let mut cons: Vec<Constraint> = (1..filter.n).map(Constraint::Order).collect();
    cons.push(Constraint::Sum);
    cons.extend(filter.minimal_elements.iter().cloned().map(Constraint::Member));
    cons.extend(filter.maximal_nonmembers().into_iter().map(Constraint::NonMember));
    cons
}

/// Decides whether some sorted configuration with non-negative total has
/// exactly `filter` as its non-negative family.
///
/// Strict negativity is written as `<= -1`: every constraint except that
/// one is homogeneous, so any solution with negative non-member sums scales
/// to one with sums at most `-1`.
pub fn lp_feasible(filter: &FilterFamily) -> FeasibilityCertificate {
    certify_system(filter.n, filter_constraints(filter))
}

pub(crate) fn certify_system(n: usize, constraints: Vec<Constraint>) -> FeasibilityCertificate {
    if let Some(x) = solve_primal(n, &constraints) {
        return FeasibilityCertificate {
            kind: CertificateKind::Feasible,
            n,
            constraints,
            witness_config: Some(x),
            farkas_multipliers: None,
        };
    }
    let mu = solve_farkas(n, &constraints);
    FeasibilityCertificate {
        kind: CertificateKind::Infeasible,
        n,
        constraints,
        witness_config: None,
        farkas_multipliers: mu,
    }
}

/// Variables `y_i = x_i - x_{i+1} >= 0`, `x_n = u - v`, one slack per
/// non-order constraint. Returns an integer configuration.
fn solve_primal(n: usize, constraints: &[Constraint]) -> Option<Configuration> {
    let rows: Vec<&Constraint> =
        constraints.iter().filter(|c| !matches!(c, Constraint::Order(_))).collect();
    let nv = n - 1 + 2;
    let cols = nv + rows.len();
    let mut a = Vec::with_capacity(rows.len());
    let mut b = Vec::with_capacity(rows.len());
    for (r, con) in rows.iter().enumerate() {
        let coef = con.coefficients(n);
        let mut row = vec![Rational::zero(); cols];
        let mut prefix = Rational::zero();
        for j in 0..n - 1 {
            prefix += &coef[j];
            row[j] = prefix.clone();
        }
        let total: Rational = coef.iter().sum();
        row[n - 1] = total.clone();
        row[n] = -total;
        row[nv + r] = -Rational::one();
        a.push(row);
        b.push(con.rhs());
    }
    let z = find_nonneg_solution(&a, &b)?;
    let mut x = vec![&z[n - 1] - &z[n]; n];
    for i in (0..n - 1).rev() {
        x[i] = &x[i + 1] + &z[i];
    }
    let lcm = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let scale = Rational::from_integer(lcm);
    let values = x.into_iter().map(|v| v * &scale).collect();
    Configuration::new(values).ok()
}

fn solve_farkas(n: usize, constraints: &[Constraint]) -> Option<Vec<Rational>> {
    let coefs: Vec<Vec<Rational>> = constraints.iter().map(|c| c.coefficients(n)).collect();
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| coefs.iter().map(|row| row[i].clone()).collect())
        .collect();
    a.push(constraints.iter().map(Constraint::rhs).collect());
    let mut b = vec![Rational::zero(); n];
    b.push(Rational::one());
    find_nonneg_solution(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::count_nonneg_ksums;
    use crate::solver::fm::fourier_motzkin_feasible;

    fn ks(v: &[usize]) -> KSubset {
        KSubset::from_sorted(v.to_vec())
    }

    #[test]
    fn full_family_is_feasible() {
        let f = FilterFamily::all(5, 2).unwrap();
        let c = lp_feasible(&f);
        assert_eq!(c.kind, CertificateKind::Feasible);
        assert!(c.verify());
    }

    #[test]
    fn top_pair_alone_is_infeasible() {
        let f = FilterFamily::up_closure(5, 2, &[ks(&[1, 2])]).unwrap();
        let c = lp_feasible(&f);
        assert_eq!(c.kind, CertificateKind::Infeasible);
        assert!(c.verify());
        let (members, nonmembers) = c.core().unwrap();
        assert!(members.iter().all(|s| f.contains(s)));
        assert!(nonmembers.iter().all(|s| !f.contains(s)));
    }

    #[test]
    fn three_pairs_are_realized_exactly() {
        let f = FilterFamily::up_closure(5, 2, &[ks(&[2, 3])]).unwrap();
        let c = lp_feasible(&f);
        assert_eq!(c.kind, CertificateKind::Feasible);
        assert!(c.verify());
        let x = c.witness_config.unwrap();
        assert!(x.values().iter().all(|v| v.is_integer()));
        let fam = count_nonneg_ksums(&x, 2).unwrap().family;
        assert_eq!(fam.members().collect::<Vec<_>>(), f.implied_members.members().collect::<Vec<_>>());
        let expected = Configuration::from_integers(&[2, 2, 2, -3, -3]).unwrap();
        assert_eq!(count_nonneg_ksums(&expected, 2).unwrap().count, 3u32.into());
    }

    #[test]
    fn tampered_certificates_fail() {
        let f = FilterFamily::up_closure(5, 2, &[ks(&[1, 2])]).unwrap();
        let mut c = lp_feasible(&f);
        c.farkas_multipliers.as_mut().unwrap()[0] += Rational::one();
        assert!(!c.verify());
        let g = FilterFamily::up_closure(5, 2, &[ks(&[2, 3])]).unwrap();
        let mut c = lp_feasible(&g);
        c.constraints.push(Constraint::Member(ks(&[4, 5])));
        assert!(!c.verify());
    }

    #[test]
    fn agrees_with_elimination() {
        for n in 2..=6 {
            let p = super::super::filter::Poset::new(n, 2);
            for i in 0..p.len() {
                let f = FilterFamily::up_closure(n, 2, &[p.sets[i].clone()]).unwrap();
                let c = lp_feasible(&f);
                assert!(c.verify());
                let sys: Vec<_> = c.constraints.iter().map(|k| (k.coefficients(n), k.rhs())).collect();
                let fm = fourier_motzkin_feasible(&sys).unwrap();
                assert_eq!(fm, c.kind == CertificateKind::Feasible, "n={n} {:?}", p.sets[i]);
            }
        }
    }
}
