//! End-to-end acceptance run. Prints one `criterion N: PASS|FAIL` line per
//! criterion and fails if any criterion fails.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use mms_cli::suite::{
    adversarial_k3, brute_force_min_k2, k2_configs, perturbed_k3, soundness_sweep,
    MULTIPLE_OF_K_CASES,
};
use mms_core::bounds::{
    propagate_equality, thm1_threshold, thm1_threshold_check, thm2_first_stage_binomial,
    thm2_stage_check,
};
use mms_core::constructions::{mms_counterexample, star_config};
use mms_core::partition::{baranyai_partition, partition_lower_bound_witnesses, validate_partition};
use mms_core::solver::{exact_a, exact_a_with, SolverOptions};
use mms_core::witness::{extract_thm1, extract_thm2, WitnessMode, WitnessOptions};
use mms_core::{binomial, count_nonneg_ksums, ksum};
use num_bigint::BigUint;
use num_traits::Signed;

struct Outcome {
    ok: bool,
    note: String,
}

fn outcome(ok: bool, note: impl Into<String>) -> Outcome {
    Outcome { ok, note: note.into() }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if took > limit {
        o.ok = false;
        o.note = format!("{}; took {took:?}, limit {limit:?}", o.note);
    } else {
        o.note = format!("{} ({took:.1?})", o.note);
    }
    o
}

fn criterion_1() -> Outcome {
    let mut bad = Vec::new();
    for &(n, k) in &MULTIPLE_OF_K_CASES {
        let target = binomial(n as u64 - 1, k as i64 - 1);
        let p = baranyai_partition(n, k, 0).expect("buildable");
        let valid = validate_partition(&p).is_ok() && BigUint::from(p.class_count()) == target;
        let star = star_config(n, k).unwrap().config;
        let lower = partition_lower_bound_witnesses(&star, k).unwrap().count().clone();
        let upper = count_nonneg_ksums(&star, k).unwrap().count;
        if !(valid && lower == target && upper == target) {
            bad.push((n, k));
        }
    }
    outcome(bad.is_empty(), format!("7 cases, failing {bad:?}"))
}

fn criterion_2() -> Outcome {
    let expected = [(4, 3u32), (5, 3), (6, 5), (7, 6)];
    let mut got = Vec::new();
    let mut ok = true;
    for (n, a) in expected {
        let r = exact_a(n, 2, mms_core::solver::DEFAULT_BUDGET).expect("small instance");
        let equal = r.a_value == binomial(n as u64 - 1, 1);
        ok &= r.exact && r.a_value == BigUint::from(a) && equal == (n != 5);
        got.push(format!("A({n},2)={}", r.a_value));
    }
    outcome(ok, got.join(" "))
}

fn criterion_3() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for k in [3usize, 4, 5] {
        let c = mms_counterexample(k).unwrap();
        let count = count_nonneg_ksums(&c.config, k).unwrap().count;
        let rhs = binomial(3 * k as u64, k as i64 - 1);
        ok &= count == binomial(3 * k as u64 - 2, k as i64) && count < rhs;
        notes.push(format!("k={k}: {count} < {rhs}"));
    }
    let c = mms_counterexample(2).unwrap();
    let count = count_nonneg_ksums(&c.config, 2).unwrap().count;
    ok &= count >= binomial(6, 1);
    notes.push(format!("k=2: {count} >= 6"));
    outcome(ok, notes.join(", "))
}

fn criterion_4() -> Outcome {
    let s = soundness_sweep(1000, 0, 0);
    let ok = s.configs >= 1000 && s.violations == 0 && s.errors.is_empty();
    outcome(
        ok,
        format!(
            "{} configs, {} witnesses, {} violations, {} errors, branches {:?}",
            s.configs,
            s.witnesses_checked,
            s.violations,
            s.errors.len(),
            s.branches
        ),
    )
}

fn criterion_5() -> Outcome {
    assert_eq!(thm1_threshold(2), BigUint::from(32u32));
    let mut tested = 0;
    let mut failures = Vec::new();
    for n in 32..=64 {
        for c in k2_configs(n, 0) {
            tested += 1;
            let r = extract_thm1(&c, 2, &WitnessOptions::default()).expect("valid input");
            let sound = r
                .witnesses
                .members()
                .all(|w| !ksum(&c, w).unwrap().is_negative());
            if !(r.certified && sound && r.witnesses.count() >= &BigUint::from(n as u32 - 1)) {
                failures.push(n);
            }
        }
    }
    outcome(failures.is_empty(), format!("{tested} configs, failing n {failures:?}"))
}

fn criterion_6() -> Outcome {
    let n = 5200;
    let target = binomial(5199, 2);
    let opts = WitnessOptions {
        mode: WitnessMode::Counted,
        sample_size: 1000,
        seed: 0,
        workers: 0,
    };
    let mut ok = true;
    let mut notes = vec![format!("target {target}")];
    for (name, c) in [
        ("star", star_config(n, 3).unwrap().config),
        ("adversarial", adversarial_k3(n)),
        ("perturbed", perturbed_k3(n, 0)),
    ] {
        let r = extract_thm2(&c, 3, &opts).expect("in range");
        let samples = r.witnesses.samples();
        let sound = samples.iter().all(|w| !ksum(&c, w).unwrap().is_negative());
        ok &= r.certified && sound && samples.len() == 1000 && r.guaranteed_count >= target;
        notes.push(format!("{name}: {} via {}", r.guaranteed_count, r.branch.as_str()));
    }
    outcome(ok, notes.join(", "))
}

fn criterion_7() -> Outcome {
    let thm1_ok = (2..=8).all(|k| {
        let n = usize::try_from(thm1_threshold(k)).unwrap();
        thm1_threshold_check(n, k).unwrap().all_hold()
    });
    let stages_ok = (1..=5200 / 6).all(|p| {
        let r = thm2_stage_check(5200, 3, p).unwrap();
        r.holds && r.cross_check
    });
    let binom_ok = (19..=100).all(|n| {
        let r = thm2_first_stage_binomial(n, 3).unwrap();
        let exact = BigUint::from(2u32) * binomial(n as u64 - 4, 2) > binomial(n as u64 - 1, 2);
        r.holds && r.cross_check && exact
    });
    outcome(
        thm1_ok && stages_ok && binom_ok,
        format!("thm1 chain {thm1_ok}, stage loop {stages_ok}, first-stage binomial {binom_ok}"),
    )
}

fn criterion_8() -> Outcome {
    let closure4 = propagate_equality(&BTreeSet::from([4]), 2, 10).closure;
    let closure7 = propagate_equality(&BTreeSet::from([7]), 2, 10).closure;
    let mut disagreements = Vec::new();
    for n in 2..=10 {
        if closure4.contains(&n) || closure7.contains(&n) {
            let r = exact_a_with(n, 2, &SolverOptions::default()).unwrap();
            if !(r.exact && r.a_value == binomial(n as u64 - 1, 1)) {
                disagreements.push(n);
            }
        }
    }
    let f = propagate_equality(&BTreeSet::from([7]), 2, 20).f_upper_bound;
    outcome(
        disagreements.is_empty() && f == Some(7),
        format!("closures {closure4:?} {closure7:?}, disagreements {disagreements:?}, f(2) <= {f:?}"),
    )
}

fn criterion_9() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in 2..=6 {
        let brute = brute_force_min_k2(n);
        let r = exact_a(n, 2, mms_core::solver::DEFAULT_BUDGET).unwrap();
        ok &= r.exact && r.a_value == BigUint::from(brute);
        notes.push(format!("n={n}: {}={brute}", r.a_value));
    }
    outcome(ok, notes.join(", "))
}

fn reproduce(dir: &Path, workers: usize) -> (bool, Vec<u8>) {
    let status = Command::new(env!("CARGO_BIN_EXE_mms"))
        .args(["reproduce", "--seed", "0", "--workers", &workers.to_string(), "--out"])
        .arg(dir)
        .env_remove("MMS_SEED")
        .env_remove("MMS_INJECT_FAULT")
        .output()
        .expect("binary runs");
    (status.status.success(), std::fs::read(dir.join("paper.json")).unwrap_or_default())
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let w = std::thread::available_parallelism().map_or(4, |n| n.get()).max(2);
    let (ok_a, a) = reproduce(&tmp.path().join("a"), w);
    let (ok_b, b) = reproduce(&tmp.path().join("b"), w);
    let (ok_c, c) = reproduce(&tmp.path().join("c"), 1);
    let ok = ok_a && ok_b && ok_c && !a.is_empty() && a == b && a == c;
    outcome(ok, format!("{} bytes, same seed identical {}, 1 vs {w} workers identical {}", a.len(), a == b, a == c))
}

#[test]
fn acceptance() {
    let minute = Duration::from_secs(60);
    let criteria: Vec<(usize, Outcome)> = vec![
        (1, timed(minute, criterion_1)),
        (2, timed(5 * minute, criterion_2)),
        (3, timed(minute, criterion_3)),
        (4, timed(10 * minute, criterion_4)),
        (5, timed(5 * minute, criterion_5)),
        (6, timed(5 * minute, criterion_6)),
        (7, timed(2 * minute, criterion_7)),
        (8, timed(minute, criterion_8)),
        (9, timed(10 * minute, criterion_9)),
        (10, timed(10 * minute, criterion_10)),
    ];
    // Written to the raw stderr handle so the lines survive output capture.
    let mut err = std::io::stderr().lock();
    for (i, o) in &criteria {
        let _ = writeln!(err, "criterion {i}: {} - {}", if o.ok { "PASS" } else { "FAIL" }, o.note);
    }
    let failed: Vec<usize> = criteria.iter().filter(|(_, o)| !o.ok).map(|(i, _)| *i).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
