//! Phase one of the simplex method over exact rationals.

use num_traits::{Signed, Zero};

use crate::numerics::Rational;

/// Finds `x >= 0` with `A x = b`, or `None` if there is none.
///
/// Artificial variables start as the basis; their sum is driven to zero
/// using Bland's rule, which cannot cycle. Returns a basic solution.
pub fn find_nonneg_solution(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let m = a.len();
    let cols = a.first().map_or(0, Vec::len);
    if m == 0 {
        return Some(vec![Rational::zero(); cols]);
    }
    let width = cols + m + 1;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m + 1);
    for (i, row) in a.iter().enumerate() {
        let flip = b[i].is_negative();
        let mut r = Vec::with_capacity(width);
        for v in row {
            r.push(if flip { -v } else { v.clone() });
        }
        for j in 0..m {
            r.push(if i == j { Rational::from_integer(1.into()) } else { Rational::zero() });
        }
        r.push(if flip { -&b[i] } else { b[i].clone() });
        t.push(r);
    }
    // Reduced costs of the phase-one objective (sum of artificials).
    let mut obj = vec![Rational::zero(); width];
    for row in &t {
        for j in 0..cols {
            obj[j] -= &row[j];
        }
        obj[width - 1] -= &row[width - 1];
    }
    t.push(obj);
    let mut basis: Vec<usize> = (cols..cols + m).collect();

    while let Some(enter) = (0..cols + m).find(|&j| t[m][j].is_negative()) {
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            leave = match leave {
                None => Some(i),
                Some(l) => {
                    let lhs = &t[i][width - 1] * &t[l][enter];
                    let rhs = &t[l][width - 1] * &t[i][enter];
                    if lhs < rhs || (lhs == rhs && basis[i] < basis[l]) {
                        Some(i)
                    } else {
                        Some(l)
                    }
                }
            };
        }
        // Phase one is bounded below by zero, so a pivot row always exists.
        let r = leave?;
        pivot(&mut t, r, enter);
        basis[r] = enter;
    }
    if !t[m][width - 1].is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &j) in basis.iter().enumerate() {
        if j < cols {
            x[j] = t[i][width - 1].clone();
        }
    }
    Some(x)
}

fn pivot(t: &mut [Vec<Rational>], r: usize, c: usize) {
    let p = t[r][c].clone();
    for v in t[r].iter_mut() {
        *v /= &p;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (v, pv) in row.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
}
