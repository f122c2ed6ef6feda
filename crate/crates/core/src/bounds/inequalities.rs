use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::Serialize;

use super::interval::{compare_with_thm2_threshold, thm2_threshold_interval};
use super::{ri, rpow, BoundReport, BoundsError};
use crate::numerics::{binomial, Rational};
use crate::witness::two_range_parameters;

fn rb(v: BigUint) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `(p - q)^m` by the binomial expansion.
fn expanded_power(p: &Rational, q: &Rational, m: u32) -> Rational {
    (0..=m)
        .map(|i| {
            let term = rb(binomial(m as u64, i as i64)) * rpow(p, m - i) * rpow(q, i);
            if i % 2 == 0 { term } else { -term }
        })
        .fold(Rational::zero(), |a, b| a + b)
}

/// `(p - q)^m >= p^m - m p^{m-1} q`, the first two terms of the expansion,
/// which holds once the first term dominates the second (`p > m q`).
pub fn unimodal_gap_lb(p: &Rational, q: &Rational, m: u32) -> Result<BoundReport, BoundsError> {
    if p <= &Rational::zero() || q <= &Rational::zero() || m == 0 {
        return Err(BoundsError::NonPositive);
    }
    let lhs = rpow(&(p - q), m);
    let rhs = rpow(p, m) - ri(m as i64) * rpow(p, m - 1) * q;
    let agree = lhs == expanded_power(p, q, m);
    let mut r = BoundReport::new("unimodal_gap_lb", lhs, rhs, false)
        .param("p", p)
        .param("q", q)
        .param("m", m)
        .cross(agree);
    r.precondition_met = p > &(ri(m as i64) * q);
    Ok(r)
}

/// `3k^{k+1} + k^3`.
pub fn thm1_threshold(k: usize) -> BigUint {
    let kb = BigUint::from(k);
    BigUint::from(3u32) * kb.pow(k as u32 + 1) + kb.pow(3)
}

/// `(n - 3k)^{k-1} + (n/k - k)^{k-1} >= n^{k-1}` with `n/k` exact, plus
/// the steps that reduce it to `n >= 3k^{k+1} + k^3`.
pub fn thm1_threshold_check(n: usize, k: usize) -> Result<BoundReport, BoundsError> {
    if k < 2 {
        return Err(BoundsError::KTooSmall { k, min: 2 });
    }
    let (nr, kr) = (ri(n as i64), ri(k as i64));
    let m = k as u32 - 1;
    let nk = &nr / &kr;
    let lhs = rpow(&(&nr - ri(3) * &kr), m) + rpow(&(&nk - &kr), m);
    let rhs = rpow(&nr, m);
    let cross = lhs == expanded_power(&nr, &(ri(3) * &kr), m) + expanded_power(&nk, &kr, m);
    let mut r = BoundReport::new("thm1_threshold", lhs, rhs.clone(), false)
        .param("n", n)
        .param("k", k)
        .cross(cross);

    let mut first = BoundReport::new("first_term_condition_n", nr.clone(), ri(3) * &kr * (&kr - ri(1)), true);
    first = first.param("form", "n > 3k(k-1)");
    let mut second =
        BoundReport::new("first_term_condition_n_over_k", nr.clone(), &kr * &kr * (&kr - ri(1)), true);
    second = second.param("form", "n > k^2(k-1)");

    // n^{k-1} - 3k^2 n^{k-2} + n^{k-1}/k^{k-1} - n^{k-2}/k^{k-4}
    let km4 = if k >= 4 { rpow(&kr, k as u32 - 4) } else { ri(1) / rpow(&kr, 4 - k as u32) };
    let chained = &rhs - ri(3) * &kr * &kr * rpow(&nr, m - 1) + rpow(&nr, m) / rpow(&kr, m)
        - rpow(&nr, m - 1) / km4;
    let chain = BoundReport::new("chained_lower_bound", chained, rhs, false);
    let threshold = rb(thm1_threshold(k));
    let equiv_ok = chain.holds == (nr >= threshold);
    let equivalence = BoundReport::new("threshold_equivalence", nr.clone(), threshold, false)
        .param("chained_holds", chain.holds)
        .cross(equiv_ok);
    let mut equivalence = equivalence;
    // This check asserts the equivalence, not the inequality itself.
    equivalence.holds = equiv_ok;

    let count = rb(binomial(n as u64 - 2 * k as u64, k as i64 - 1) + binomial((n / k) as u64, k as i64 - 1));
    let target = rb(binomial(n as u64 - 1, k as i64 - 1));
    let mut counting = BoundReport::new("binomial_count", count, target, false)
        .param("form", "C(n-2k,k-1) + C(floor(n/k),k-1) >= C(n-1,k-1)");
    counting.precondition_met = n >= 2 * k;

    let mut g1 = unimodal_gap_lb(&nr, &(ri(3) * &kr), m)?;
    g1.name = "unimodal_first_term".to_string();
    let mut g2 = unimodal_gap_lb(&nk, &kr, m)?;
    g2.name = "unimodal_second_term".to_string();
    for c in [&mut first, &mut second] {
        c.precondition_met = true;
    }
    r.sub_checks = vec![first, second, g1, g2, chain, equivalence, counting];
    Ok(r)
}

/// `(p+1)(n - k(p+1))^{k-1} > n^{k-1}` for one stage `p`, with the
/// regime-specific sufficient conditions as sub-checks.
pub fn thm2_stage_check(n: usize, k: usize, p: usize) -> Result<BoundReport, BoundsError> {
    if k < 2 {
        return Err(BoundsError::KTooSmall { k, min: 2 });
    }
    let max = n / (2 * k);
    if p == 0 || p > max {
        return Err(BoundsError::POutOfRange { p, max });
    }
    let (nr, kr, pr) = (ri(n as i64), ri(k as i64), ri(p as i64));
    let m = k as u32 - 1;
    let base = &nr - &kr * (&pr + ri(1));
    let lhs = (&pr + ri(1)) * rpow(&base, m);
    let rhs = rpow(&nr, m);
    let cross = lhs == (&pr + ri(1)) * expanded_power(&nr, &(&kr * (&pr + ri(1))), m);
    let mut r = BoundReport::new("thm2_stage", lhs, rhs.clone(), true)
        .param("n", n)
        .param("k", k)
        .param("p", p)
        .cross(cross);

    let bin_l = rb(BigUint::from(p + 1) * binomial((n - k * p - 1) as u64, k as i64 - 1));
    let bin_r = rb(binomial(n as u64 - 1, k as i64 - 1));
    let mut subs = vec![BoundReport::new("binomial_form", bin_l, bin_r, true)];

    if &pr * &kr * &kr < nr {
        let mut ft = BoundReport::new("first_term_condition", nr.clone(), (&kr - ri(1)) * &kr * (&pr + ri(1)), true);
        ft = ft.param("regime", 1);
        let est = (&pr + ri(1)) * rpow(&nr, m)
            - rpow(&(&pr + ri(1)), 2) * &kr * (&kr - ri(1)) * rpow(&nr, m - 1);
        let mut est_r = BoundReport::new("regime1_estimate", est, rhs.clone(), true);
        est_r.precondition_met = ft.holds;
        let cond = BoundReport::new(
            "regime1_condition",
            &nr / (&kr * (&kr - ri(1))),
            &pr + ri(2) + ri(1) / &pr,
            true,
        );
        let mut thr = BoundReport::new("regime1_threshold", nr.clone(), ri(3) * &kr * &kr * (&kr - ri(1)), true);
        thr.precondition_met = false;
        subs.extend([ft, est_r, cond, thr]);
    } else {
        let half = &nr - &kr * (&nr / (ri(2) * &kr));
        let est_rhs = &nr / (&kr * &kr) * rpow(&half, m);
        let mut est = BoundReport::new("regime2_estimate", r.lhs.clone(), est_rhs, true).param("regime", 2);
        // The estimate needs p + 1 <= n/2k; the last stage may exceed it.
        est.precondition_met = ri(2) * &kr * (&pr + ri(1)) <= nr;
        let power = BoundReport::new(
            "regime2_power",
            rpow(&nr, k as u32) / (rpow(&ri(2), m) * &kr * &kr),
            rhs,
            true,
        );
        let thr = BoundReport::new("regime2_threshold", nr.clone(), rpow(&ri(2), m) * &kr * &kr, true);
        subs.extend([est, power, thr]);
    }
    r.sub_checks = subs;
    Ok(r)
}

/// `2 C(n-k-1, k-1) > C(n-1, k-1)`: the second stage already suffices.
pub fn thm2_first_stage_binomial(n: usize, k: usize) -> Result<BoundReport, BoundsError> {
    if k < 2 || n < k + 1 {
        return Err(BoundsError::NTooSmall { n, min: k + 1 });
    }
    let lhs = rb(BigUint::from(2u32) * binomial((n - k - 1) as u64, k as i64 - 1));
    let rhs = rb(binomial(n as u64 - 1, k as i64 - 1));
    // Falling-factorial ratio: 2 prod (n-k-1-i)/(n-1-i) > 1.
    let ratio: Rational = (0..k - 1)
        .map(|i| ri((n - k - 1 - i) as i64) / ri((n - 1 - i) as i64))
        .fold(ri(2), |a, b| a * b);
    let cross = (ratio > ri(1)) == (lhs > rhs);
    let mut r = BoundReport::new("thm2_first_stage_binomial", lhs, rhs, true)
        .param("n", n)
        .param("k", k)
        .cross(cross);
    r.precondition_met = n > 2 * k * k;
    Ok(r)
}

/// `C(n-2k, k) > C(n-1, k-1)`: too few negatives already give enough sums.
pub fn few_negatives_check(n: usize, k: usize) -> Result<BoundReport, BoundsError> {
    if k < 1 || n < 2 * k {
        return Err(BoundsError::NTooSmall { n, min: 2 * k });
    }
    let lhs = rb(binomial((n - 2 * k) as u64, k as i64));
    let rhs = rb(binomial(n as u64 - 1, k as i64 - 1));
    let num: Rational = (0..k).map(|i| ri((n - 2 * k - i) as i64)).fold(ri(1), |a, b| a * b);
    let den: Rational = (0..k - 1).map(|i| ri((n - 1 - i) as i64)).fold(ri(k as i64), |a, b| a * b);
    let cross = (num > den) == (lhs > rhs);
    Ok(BoundReport::new("few_negatives", lhs, rhs, true)
        .param("n", n)
        .param("k", k)
        .cross(cross))
}

/// Outcome of testing "`C(n-2k, k) > C(n-1, k-1)` for `n > 3k^2`" on a
/// bounded range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CarefulEstimate {
    pub k: usize,
    pub n_max: usize,
    pub holds_on_range: bool,
    pub first_failure: Option<usize>,
    /// Smallest `n` from which the inequality holds up to `n_max`.
    pub holds_from: usize,
}

pub fn careful_estimate_claim(k: usize, n_max: usize) -> CarefulEstimate {
    let start = 3 * k * k + 1;
    let holds = |n: usize| few_negatives_check(n, k).map(|r| r.holds).unwrap_or(false);
    let first_failure = (start..=n_max).find(|&n| !holds(n));
    let mut holds_from = n_max + 1;
    while holds_from > 2 * k && holds(holds_from - 1) {
        holds_from -= 1;
    }
    CarefulEstimate {
        k,
        n_max,
        holds_on_range: first_failure.is_none(),
        first_failure,
        holds_from,
    }
}

/// `n > k (4 e ln k)^k`, decided with interval enclosures.
pub fn thm2_range_check(n: usize, k: usize) -> Result<BoundReport, BoundsError> {
    if k < 2 {
        return Err(BoundsError::KTooSmall { k, min: 2 });
    }
    let cmp = compare_with_thm2_threshold(&BigInt::from(n), k as u64);
    let iv = thm2_threshold_interval(k as u64, 64);
    let mut r = BoundReport::new("thm2_range", ri(n as i64), iv.hi().clone(), true)
        .param("n", n)
        .param("k", k)
        .param("threshold_lo", crate::numerics::format_rational(iv.lo()));
    r.holds = cmp.is_some_and(|o| o.is_gt());
    r.cross_check = cmp.is_some();
    Ok(r)
}

/// `C(T, a) C(J, k-a) > C(n-1, k-1)` with the witness module's `T`, `J`
/// and `a`.
pub fn thm2_two_range_count(n: usize, k: usize) -> Result<BoundReport, BoundsError> {
    if k < 2 || n < 4 * k {
        return Err(BoundsError::NTooSmall { n, min: 4 * k });
    }
    let (t, j, a) = two_range_parameters(n, k);
    let lhs = rb(binomial(t as u64, a as i64) * binomial(j as u64, (k - a) as i64));
    let rhs = rb(binomial(n as u64 - 1, k as i64 - 1));
    Ok(BoundReport::new("thm2_two_range_count", lhs, rhs, true)
        .param("n", n)
        .param("k", k)
        .param("T", t)
        .param("J", j)
        .param("a", a))
}

/// The full chain for the `3k^{k+1} + k^3` argument at one `(n, k)`.
pub fn suite_thm1(n: usize, k: usize) -> Result<Vec<BoundReport>, BoundsError> {
    let mut out = vec![thm1_threshold_check(n, k)?];
    if n >= 2 * k {
        let mut few = few_negatives_check(n, k)?;
        few.precondition_met = rb(BigUint::from(n)) >= rb(thm1_threshold(k));
        out.push(few);
    }
    Ok(out)
}

/// The full chain for the `k (4e ln k)^k` argument at one `(n, k)`: every
/// stage `p = 1..=⌊n/2k⌋`, the second-stage binomial form, the two-range
/// count and the range test.
pub fn suite_thm2(n: usize, k: usize) -> Result<Vec<BoundReport>, BoundsError> {
    if k < 2 || n < 4 * k {
        return Err(BoundsError::NTooSmall { n, min: 4 * k.max(2) });
    }
    let max = n / (2 * k);
    let stages: Vec<BoundReport> = (1..=max).map(|p| thm2_stage_check(n, k, p)).collect::<Result<_, _>>()?;
    let held = stages.iter().filter(|s| s.holds && s.cross_check).count();
    let mut summary = BoundReport::new("thm2_stage_loop", ri(held as i64), ri(max as i64), false)
        .param("n", n)
        .param("k", k);
    summary.sub_checks = stages.into_iter().filter(|s| !(s.holds && s.cross_check)).collect();
    Ok(vec![
        summary,
        thm2_first_stage_binomial(n, k)?,
        thm2_two_range_count(n, k)?,
        thm2_range_check(n, k)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ratio;

    #[test]
    fn unimodal_examples() {
        let r = unimodal_gap_lb(&ri(10), &ri(1), 2).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (ri(81), ri(80)));
        assert!(r.holds && r.precondition_met && r.cross_check);
        let r = unimodal_gap_lb(&ri(7), &ratio(1, 1_000_000), 3).unwrap();
        assert!(r.holds && r.margin > Rational::zero() && r.margin < ratio(1, 1000));
        let r = unimodal_gap_lb(&ri(270), &ri(9), 2).unwrap();
        assert_eq!((r.lhs, r.rhs), (ri(68121), ri(68040)));
        assert!(unimodal_gap_lb(&ri(7), &ri(0), 3).is_err());
        assert!(!unimodal_gap_lb(&ri(2), &ri(1), 3).unwrap().precondition_met);
    }

    #[test]
    fn thm1_examples() {
        assert_eq!(thm1_threshold(3), BigUint::from(270u32));
        let r = thm1_threshold_check(270, 3).unwrap();
        assert!(r.all_hold(), "{r:#?}");
        let chain = r.sub_checks.iter().find(|c| c.name == "chained_lower_bound").unwrap();
        assert!(chain.holds);
        assert_eq!(chain.margin, Rational::zero());
        let r = thm1_threshold_check(32, 2).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (ri(40), ri(32)));
        assert!(r.all_hold());
        // Below the threshold the chain fails, but the raw inequality is
        // reported as it is.
        let r = thm1_threshold_check(100, 3).unwrap();
        let chain = r.sub_checks.iter().find(|c| c.name == "chained_lower_bound").unwrap();
        assert!(!chain.holds);
        assert!(!r.holds);
        for k in 2..=8 {
            let n = usize::try_from(thm1_threshold(k)).unwrap();
            assert!(thm1_threshold_check(n, k).unwrap().all_hold(), "k = {k}");
            let below = thm1_threshold_check(n - 1, k).unwrap();
            let c = below.sub_checks.iter().find(|c| c.name == "chained_lower_bound").unwrap();
            assert!(!c.holds, "k = {k}");
        }
    }

    #[test]
    fn thm2_stage_examples() {
        let r = thm2_stage_check(5200, 3, 1).unwrap();
        assert_eq!(r.lhs, ri(2 * 5194 * 5194));
        assert!(r.all_hold());
        let r = thm2_stage_check(5200, 3, 866).unwrap();
        assert!(r.holds);
        assert!(r.sub_checks.iter().any(|c| c.name == "regime2_threshold" && c.holds));
        assert!(thm2_stage_check(5200, 3, 867).is_err());
        assert!(thm2_stage_check(5200, 3, 0).is_err());
        for p in 1..=866 {
            assert!(thm2_stage_check(5200, 3, p).unwrap().all_hold(), "p = {p}");
        }
    }

    #[test]
    fn first_stage_binomial_threshold() {
        for n in 19..=100 {
            let r = thm2_first_stage_binomial(n, 3).unwrap();
            assert!(r.holds && r.cross_check, "n = {n}");
        }
        assert!(thm2_first_stage_binomial(19, 3).unwrap().precondition_met);
        assert!(!thm2_first_stage_binomial(18, 3).unwrap().precondition_met);
    }

    #[test]
    fn few_negatives_and_careful_claim() {
        assert!(few_negatives_check(270, 3).unwrap().holds);
        assert!(!few_negatives_check(10, 3).unwrap().holds);
        for k in 2..=5 {
            let c = careful_estimate_claim(k, 400);
            assert!(c.holds_from <= 3 * k * k + 1, "{c:?}");
        }
    }

    #[test]
    fn suites() {
        let s = suite_thm1(270, 3).unwrap();
        assert!(s.iter().all(BoundReport::all_hold));
        let s = suite_thm2(5200, 3).unwrap();
        assert!(s[0].holds && s[0].sub_checks.is_empty());
        assert!(s[1].holds);
        assert!(s[2].holds, "{:?}", s[2]);
        assert!(s[3].holds);
        let s = suite_thm2(1000, 3).unwrap();
        assert!(!s[3].holds);
    }
}
