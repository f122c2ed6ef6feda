//! Rational intervals with outward dyadic rounding, enough to pin down `e`,
//! natural logarithms of positive rationals, and expressions built from
//! them, to any requested precision.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::numerics::Rational;

/// Closed interval `[lo, hi]` with rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits
}

fn floor_dyadic(x: &Rational, bits: u32) -> Rational {
    let scale = pow2(bits);
    let scaled = x * Rational::from_integer(scale.clone());
    Rational::new(scaled.floor().to_integer(), scale)
}

fn ceil_dyadic(x: &Rational, bits: u32) -> Rational {
    let scale = pow2(bits);
    let scaled = x * Rational::from_integer(scale.clone());
    Rational::new(scaled.ceil().to_integer(), scale)
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "empty interval");
        Interval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::point(Rational::from_integer(v.into()))
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Widens the endpoints to multiples of `2^-bits`.
    pub fn round_out(&self, bits: u32) -> Self {
        Interval {
            lo: floor_dyadic(&self.lo, bits),
            hi: ceil_dyadic(&self.hi, bits),
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    /// Division by an interval that excludes zero.
    pub fn div(&self, other: &Interval) -> Interval {
        assert!(
            other.lo.is_positive() || other.hi.is_negative(),
            "division by an interval containing zero"
        );
        let inv = Interval {
            lo: other.hi.recip(),
            hi: other.lo.recip(),
        };
        self.mul(&inv)
    }

    /// Non-negative integer power; for intervals straddling zero the lower
    /// end is clamped at zero for even powers.
    pub fn powi(&self, e: u32) -> Interval {
        let mut acc = Interval::from_int(1);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        if e.is_multiple_of(2) && self.lo.is_negative() && self.hi.is_positive() {
            acc.lo = Rational::zero();
        }
        acc
    }

    /// [`Interval::powi`] with endpoints rounded out to `2^-bits` after each
    /// product, which keeps the rationals short.
    pub fn powi_rounded(&self, e: u32, bits: u32) -> Interval {
        assert!(!self.lo.is_negative(), "rounded power of a non-negative interval");
        let mut acc = Interval::from_int(1);
        for _ in 0..e {
            acc = acc.mul(self).round_out(bits);
        }
        acc
    }

    /// `Less` / `Greater` when the intervals are disjoint, `Equal` when both
    /// are the same point, `None` when they overlap otherwise.
    pub fn compare(&self, other: &Interval) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && other.lo == other.hi && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn midpoint_f64(&self) -> f64 {
        let mid = (&self.lo + &self.hi) / Rational::from_integer(2.into());
        mid.to_f64().unwrap_or(f64::NAN)
    }

    /// Floor of every point in the interval, if it is the same integer.
    pub fn floor_if_unique(&self) -> Option<BigInt> {
        let a = self.lo.floor().to_integer();
        let b = self.hi.floor().to_integer();
        (a == b).then_some(a)
    }

    /// Ceiling of every point in the interval, if it is the same integer.
    pub fn ceil_if_unique(&self) -> Option<BigInt> {
        let a = self.lo.ceil().to_integer();
        let b = self.hi.ceil().to_integer();
        (a == b).then_some(a)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:.12e}, {:.12e}]",
            self.lo.to_f64().unwrap_or(f64::NAN),
            self.hi.to_f64().unwrap_or(f64::NAN)
        )
    }
}

/// Enclosure of `e` of width at most about `2^-bits`.
pub fn e_interval(bits: u32) -> Interval {
    // sum_{i<=N} 1/i!, tail below 2/(N+1)!
    let eps = Rational::new(BigInt::one(), pow2(bits + 2));
    let mut sum = Rational::zero();
    let mut term = Rational::one();
    let mut i: u64 = 0;
    loop {
        sum += &term;
        i += 1;
        term /= Rational::from_integer(i.into());
        // term is now 1/i!; tail beyond the previous partial sum is < 2 * term
        if &term * Rational::from_integer(2.into()) < eps {
            break;
        }
    }
    let tail = term * Rational::from_integer(2.into());
    Interval::new(sum.clone(), sum + tail).round_out(bits + 2)
}

/// `2 atanh(z) = ln((1+z)/(1-z))` for rational `0 <= z < 1`.
fn two_atanh(z: &Rational, bits: u32) -> Interval {
    assert!(!z.is_negative() && z < &Rational::one());
    let eps = Rational::new(BigInt::one(), pow2(bits + 3));
    let z2 = z * z;
    let one_minus = Rational::one() - &z2;
    let mut power = z.clone();
    let mut sum = Rational::zero();
    let mut i: u64 = 0;
    loop {
        let denom = Rational::from_integer((2 * i + 1).into());
        sum += &power / &denom;
        power *= &z2;
        i += 1;
        // tail <= z^{2i+1} / ((2i+1)(1-z^2))
        let tail = &power / (Rational::from_integer((2 * i + 1).into()) * &one_minus);
        if tail < eps || power.is_zero() {
            let two = Rational::from_integer(2.into());
            return Interval::new(&sum * &two, (sum + tail) * two).round_out(bits + 3);
        }
    }
}

/// Enclosure of `ln 2`.
pub fn ln2_interval(bits: u32) -> Interval {
    two_atanh(&Rational::new(1.into(), 3.into()), bits)
}

/// Enclosure of `ln x` for a positive rational `x`.
///
/// Reduces to `x = 2^j * y` with `y` in `[1, 2)`, then uses the atanh series
/// with `z = (y-1)/(y+1) <= 1/3`.
pub fn ln_interval(x: &Rational, bits: u32) -> Interval {
    assert!(x.is_positive(), "ln of a non-positive number");
    let mut y = x.clone();
    let mut j: i64 = 0;
    let two = Rational::from_integer(2.into());
    while y >= two {
        y /= &two;
        j += 1;
    }
    while y < Rational::one() {
        y *= &two;
        j -= 1;
    }
    let z = (&y - Rational::one()) / (&y + Rational::one());
    let extra = 64 - (j.unsigned_abs().max(1)).leading_zeros();
    let ln_y = two_atanh(&z, bits + 2);
    let ln2 = ln2_interval(bits + 2 + extra);
    ln2.mul(&Interval::from_int(j)).add(&ln_y).round_out(bits + 2)
}

pub fn ln_int(k: u64, bits: u32) -> Interval {
    ln_interval(&Rational::from_integer(k.into()), bits)
}

/// Refines `f(bits)` until `decide` returns a value, doubling the working
/// precision from 64 bits up to `max_bits`.
pub fn refine<T>(
    max_bits: u32,
    f: impl Fn(u32) -> Interval,
    decide: impl Fn(&Interval) -> Option<T>,
) -> Option<T> {
    let mut bits = 64;
    while bits <= max_bits {
        if let Some(v) = decide(&f(bits)) {
            return Some(v);
        }
        bits *= 2;
    }
    None
}

/// Default cap for [`refine`].
pub const MAX_BITS: u32 = 1 << 14;

/// `floor(n / (2 ln k))`, rigorously, for `k >= 2`.
pub fn floor_n_over_two_ln(n: u64, k: u64) -> u64 {
    assert!(k >= 2);
    refine(
        MAX_BITS,
        |bits| Interval::from_int(n as i64).div(&ln_int(k, bits).mul(&Interval::from_int(2))),
        |iv| iv.floor_if_unique(),
    )
    .and_then(|v| v.to_u64())
    .expect("n / (2 ln k) is irrational, so refinement decides its floor")
}

/// `ceil(k / ln k)`, rigorously, for `k >= 2`.
pub fn ceil_k_over_ln(k: u64) -> u64 {
    assert!(k >= 2);
    refine(
        MAX_BITS,
        |bits| Interval::from_int(k as i64).div(&ln_int(k, bits)),
        |iv| iv.ceil_if_unique(),
    )
    .and_then(|v| v.to_u64())
    .expect("k / ln k is irrational, so refinement decides its ceiling")
}

/// Whether `ln k <= 1`, i.e. `k <= e`.
pub fn ln_at_most_one(k: u64) -> bool {
    // e is irrational, so comparing the integer k with e always decides.
    refine(MAX_BITS, e_interval, |iv| {
        Interval::from_int(k as i64).compare(iv)
    })
    .map(|o| o == Ordering::Less)
    .unwrap()
}

/// Enclosure of `k (4 e ln k)^k`.
pub fn thm2_threshold_interval(k: u64, bits: u32) -> Interval {
    let base = Interval::from_int(4)
        .mul(&e_interval(bits + 4 * k as u32 + 16))
        .mul(&ln_int(k, bits + 4 * k as u32 + 16));
    base.powi_rounded(k as u32, bits + 4 * k as u32 + 16)
        .mul(&Interval::from_int(k as i64))
}

/// Rigorous comparison of an integer `n` with `k (4 e ln k)^k`.
/// `None` only if precision runs out, which cannot happen for `k >= 2`.
pub fn compare_with_thm2_threshold(n: &BigInt, k: u64) -> Option<Ordering> {
    if k == 1 {
        return Some(n.cmp(&BigInt::zero()));
    }
    let point = Interval::point(Rational::from_integer(n.clone()));
    refine(MAX_BITS, |bits| thm2_threshold_interval(k, bits), |iv| point.compare(iv))
}

/// `ceil(k (4 e ln k)^k)`.
pub fn thm2_threshold_ceil(k: u64) -> BigInt {
    if k == 1 {
        return BigInt::zero();
    }
    refine(MAX_BITS, |bits| thm2_threshold_interval(k, bits), |iv| iv.ceil_if_unique())
        .expect("threshold is irrational")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(iv: &Interval, x: f64, tol: f64) -> bool {
        (iv.midpoint_f64() - x).abs() <= tol
    }

    #[test]
    fn constants_enclose_true_values() {
        let e = e_interval(80);
        assert!(close(&e, std::f64::consts::E, 1e-15));
        assert!(e.width() < Rational::new(1.into(), pow2(76)));
        let l2 = ln2_interval(80);
        assert!(close(&l2, std::f64::consts::LN_2, 1e-15));
        for k in [2u64, 3, 10, 1000, 123_456_789] {
            let l = ln_int(k, 80);
            assert!(close(&l, (k as f64).ln(), 1e-12), "ln {k}: {l}");
            assert!(l.width() < Rational::new(1.into(), pow2(70)));
        }
        let l = ln_interval(&Rational::new(1.into(), 7.into()), 60);
        assert!(close(&l, (1.0f64 / 7.0).ln(), 1e-14));
    }

    #[test]
    fn ln_one_is_zero() {
        let l = ln_int(1, 64);
        assert!(l.contains(&Rational::zero()));
    }

    #[test]
    fn rigorous_floors_and_ceilings() {
        assert_eq!(floor_n_over_two_ln(5200, 3), 2366);
        assert_eq!(ceil_k_over_ln(3), 3);
        assert_eq!(ceil_k_over_ln(10), 5);
        assert!(ln_at_most_one(2));
        assert!(!ln_at_most_one(3));
    }

    #[test]
    fn thm2_threshold_values() {
        // 3 (4 e ln 3)^3 ~ 5113.3
        let c = thm2_threshold_ceil(3);
        assert_eq!(c, BigInt::from(5114));
        assert_eq!(
            compare_with_thm2_threshold(&BigInt::from(5200), 3),
            Some(Ordering::Greater)
        );
        assert_eq!(
            compare_with_thm2_threshold(&BigInt::from(5113), 3),
            Some(Ordering::Less)
        );
        let f = thm2_threshold_interval(3, 64).midpoint_f64();
        let direct = 3.0 * (4.0 * std::f64::consts::E * 3f64.ln()).powi(3);
        assert!((f - direct).abs() / direct < 1e-12);
    }

    #[test]
    fn interval_ops() {
        let a = Interval::new(Rational::from_integer((-2).into()), Rational::from_integer(3.into()));
        let sq = a.powi(2);
        assert_eq!(sq.lo(), &Rational::zero());
        assert_eq!(sq.hi(), &Rational::from_integer(9.into()));
        let b = Interval::from_int(2);
        assert_eq!(a.mul(&b).lo(), &Rational::from_integer((-4).into()));
        assert_eq!(b.compare(&Interval::from_int(2)), Some(Ordering::Equal));
        assert_eq!(a.compare(&b), None);
        assert_eq!(b.sub(&Interval::from_int(5)).hi(), &Rational::from_integer((-3).into()));
    }
}
