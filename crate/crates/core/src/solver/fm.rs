//! Fourier–Motzkin elimination, used as an independent feasibility check.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::numerics::Rational;

/// Limit on intermediate constraint count before giving up.
pub const FM_CONSTRAINT_LIMIT: usize = 50_000;

/// Decides whether `a_j . x >= c_j` for all `j` has a real solution.
/// `None` if elimination exceeds [`FM_CONSTRAINT_LIMIT`] constraints.
pub fn fourier_motzkin_feasible(system: &[(Vec<Rational>, Rational)]) -> Option<bool> {
    let vars = system.first().map_or(0, |c| c.0.len());
    let mut cons: BTreeSet<(Vec<Rational>, Rational)> =
        system.iter().map(|(a, c)| normalize(a.clone(), c.clone())).collect();
    for v in 0..vars {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), BTreeSet::new());
        for c in cons {
            if c.0[v].is_positive() {
                pos.push(c);
            } else if c.0[v].is_negative() {
                neg.push(c);
            } else {
                rest.insert(c);
            }
        }
        for (pa, pc) in &pos {
            for (na, nc) in &neg {
                let fp = -&na[v];
                let fq = pa[v].clone();
                let a: Vec<Rational> = pa.iter().zip(na).map(|(x, y)| x * &fp + y * &fq).collect();
                let c = pc * &fp + nc * &fq;
                rest.insert(normalize(a, c));
                if rest.len() > FM_CONSTRAINT_LIMIT {
                    return None;
                }
            }
        }
        cons = rest;
    }
    Some(cons.iter().all(|(_, c)| !c.is_positive()))
}

/// Scales so the largest absolute coefficient is 1, which merges duplicates.
fn normalize(a: Vec<Rational>, c: Rational) -> (Vec<Rational>, Rational) {
    let scale = a.iter().map(|x| x.abs()).max().unwrap_or_default();
    if scale.is_zero() {
        // 0 >= c: keep only the sign of c.
        let c = if c.is_positive() {
            Rational::from_integer(1.into())
        } else {
            Rational::zero()
        };
        return (a, c);
    }
    (a.iter().map(|x| x / &scale).collect(), c / scale)
}
