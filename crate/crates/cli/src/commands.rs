use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::Context;
use mms_core::bounds::{
    careful_estimate_claim, f_bound_values, few_negatives_check, suite_thm1, suite_thm2,
    thm1_threshold_check, thm2_first_stage_binomial, thm2_range_check, thm2_stage_check,
    thm2_two_range_count, unimodal_gap_lb, BoundReport, BoundsError,
};
use mms_core::constructions::{construct, ConstructionName};
use mms_core::numerics::parse_rational;
use mms_core::partition::{baranyai_partition, validate_partition, BaranyaiPartition, PartitionError};
use mms_core::solver::{
    exact_a_with, search_upper_bound, verify_conjecture_range, SolverError, SolverOptions,
    Strategy, Verdict,
};
use mms_core::witness::{extract_thm1, extract_thm2, WitnessError, WitnessMode, WitnessOptions, WitnessReport};
use mms_core::{binomial, Configuration, KSubset};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::suite::{run_suite, Check, Fault, SuiteOptions};
use crate::{Cli, CliError, Command, Format, Global, ModeArg};

pub(crate) fn dispatch(cli: &Cli, command_line: &str) -> Result<(), CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Construct { name, n, k } => cmd_construct(g, name, *n, *k),
        Command::Baranyai { validate: Some(path), .. } => cmd_validate_partition(g, path),
        Command::Baranyai { n, k, .. } => {
            cmd_baranyai(g, n.expect("required by clap"), k.expect("required by clap"))
        }
        Command::Witness { config, k, theorem, mode, sample_size } => {
            cmd_witness(g, config, *k, *theorem, *mode, *sample_size)
        }
        Command::Solve { n, k, cap } => cmd_solve(g, *n, *k, *cap),
        Command::Sweep { k, n_lo, n_hi, cap } => cmd_sweep(g, *k, *n_lo, *n_hi, *cap),
        Command::Upper { n, k, strategy } => cmd_upper(g, *n, *k, strategy),
        Command::Check { inequality, suite, params, n, k } => {
            cmd_check(g, inequality.as_deref(), suite.as_deref(), params, *n, *k)
        }
        Command::Reproduce { soundness_configs } => cmd_reproduce(g, *soundness_configs, command_line),
    }
}

/// Writes `content` to `<out>/<file>` or to stdout.
fn emit(g: &Global, file: &str, content: &str) -> Result<(), CliError> {
    match &g.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(file);
            fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
        }
        None => {
            print!("{content}");
            if !content.ends_with('\n') {
                println!();
            }
        }
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn config_json(c: &Configuration) -> Value {
    serde_json::to_value(c).expect("configuration serializes")
}

fn subsets_json<'a>(sets: impl IntoIterator<Item = &'a KSubset>) -> Value {
    Value::Array(sets.into_iter().map(|s| json!(s.indices())).collect())
}

fn solver_error(e: SolverError) -> CliError {
    match e {
        SolverError::InvalidNk { .. } | SolverError::OverCap { .. } => CliError::Usage(e.to_string()),
        SolverError::CertificateFailed(_) => CliError::CheckFailed(e.to_string()),
        other => CliError::Other(other.into()),
    }
}

fn witness_error(e: WitnessError) -> CliError {
    match e {
        WitnessError::Unsound(_) => CliError::CheckFailed(e.to_string()),
        WitnessError::Numerics(_) | WitnessError::Partition(PartitionError::FlowStalled(_)) => {
            CliError::Other(e.into())
        }
        other => CliError::Usage(other.to_string()),
    }
}

fn bounds_error(e: BoundsError) -> CliError {
    CliError::Usage(e.to_string())
}

fn cmd_construct(g: &Global, name: &str, n: Option<usize>, k: usize) -> Result<(), CliError> {
    let name: ConstructionName = name.parse().map_err(CliError::Usage)?;
    let n = match (name, n) {
        (ConstructionName::MmsCounterexample, _) => 3 * k + 1,
        (_, Some(n)) => n,
        (_, None) => return Err(CliError::Usage(format!("--n is required for {name}"))),
    };
    let c = construct(name, n, k).map_err(|e| CliError::Usage(e.to_string()))?;
    let meta = json!({
        "name": c.name.to_string(),
        "n": c.n,
        "k": c.k,
        "predicted_count": c.predicted_count.to_string(),
        "prediction_formula": c.prediction_formula,
        "target": binomial(c.n as u64 - 1, c.k as i64 - 1).to_string(),
        "config": config_json(&c.config),
    });
    let stem = format!("{}_n{}_k{}", c.name, c.n, c.k);
    match (&g.out, g.format.unwrap_or(Format::Text)) {
        (Some(_), _) => {
            emit(g, &format!("{stem}.txt"), &c.config.to_text())?;
            emit(g, &format!("{stem}.json"), &pretty(&meta))
        }
        (None, Format::Json) => emit(g, "", &pretty(&meta)),
        (None, _) => emit(g, "", &c.config.to_text()),
    }
}

fn cmd_baranyai(g: &Global, n: usize, k: usize) -> Result<(), CliError> {
    let p = baranyai_partition(n, k, g.seed).map_err(|e| match e {
        PartitionError::FlowStalled(_) => CliError::Other(e.into()),
        other => CliError::Usage(other.to_string()),
    })?;
    if g.format == Some(Format::Csv) {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["class", "block"]).map_err(anyhow::Error::from)?;
        for (i, class) in p.classes.iter().enumerate() {
            for b in &class.blocks {
                w.write_record([(i + 1).to_string(), join_indices(b)]).map_err(anyhow::Error::from)?;
            }
        }
        emit(g, &format!("baranyai_n{n}_k{k}.csv"), &csv_string(w)?)
    } else {
        let classes: Vec<Value> = p.classes.iter().map(|c| subsets_json(&c.blocks)).collect();
        let v = json!({
            "n": n,
            "k": k,
            "class_count": p.class_count(),
            "classes": classes,
        });
        emit(g, &format!("baranyai_n{n}_k{k}.json"), &pretty(&v))
    }
}

fn cmd_validate_partition(g: &Global, path: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let p: BaranyaiPartition = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: line {}: {e}", path.display(), e.line())))?;
    let verdict = validate_partition(&p);
    let mut v = json!({"n": p.n, "k": p.k, "class_count": p.class_count(), "valid": verdict.is_ok()});
    if let Err(d) = &verdict {
        v["defect"] = json!(d.to_string());
    }
    emit(g, "baranyai_validation.json", &pretty(&v))?;
    verdict.map_err(|d| CliError::CheckFailed(format!("invalid partition: {d}")))
}

fn join_indices(s: &KSubset) -> String {
    s.indices().iter().map(usize::to_string).collect::<Vec<_>>().join(";")
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok(String::from_utf8(bytes).map_err(anyhow::Error::from)?)
}

pub(crate) fn witness_json(r: &WitnessReport, witnesses_path: Option<&str>) -> Value {
    let family = if witnesses_path.is_some() {
        json!({
            "count": r.witnesses.count().to_string(),
            "enumerated": true,
        })
    } else if r.witnesses.is_enumerated() {
        json!({
            "count": r.witnesses.count().to_string(),
            "enumerated": true,
            "members": subsets_json(r.witnesses.members()),
        })
    } else {
        json!({
            "count": r.witnesses.count().to_string(),
            "enumerated": false,
            "samples": subsets_json(r.witnesses.samples()),
        })
    };
    let parts: Vec<Value> = r
        .parts
        .iter()
        .map(|p| json!({"label": p.label, "count": p.count.to_string()}))
        .collect();
    json!({
        "theorem": r.theorem,
        "n": r.n,
        "k": r.k,
        "branch": r.branch.as_str(),
        "guaranteed_count": r.guaranteed_count.to_string(),
        "target": r.target.to_string(),
        "meets_target": r.meets_target(),
        "certified": r.certified,
        "in_theorem_range": r.in_theorem_range,
        "theorem_claim_holds": r.theorem_claim_holds(),
        "parts": parts,
        "parameters": r.parameters,
        "trace": r.trace,
        "witnesses": family,
        "witnesses_path": witnesses_path,
    })
}

/// One row per witness, columns `i1..ik`.
fn witnesses_csv(r: &WitnessReport) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record((1..=r.k).map(|i| format!("i{i}"))).map_err(anyhow::Error::from)?;
    for s in r.witnesses.members() {
        w.write_record(s.indices().iter().map(usize::to_string)).map_err(anyhow::Error::from)?;
    }
    csv_string(w)
}

fn cmd_witness(
    g: &Global,
    path: &Path,
    k: usize,
    theorem: u8,
    mode: ModeArg,
    sample_size: usize,
) -> Result<(), CliError> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config = Configuration::parse(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let opts = WitnessOptions {
        mode: match mode {
            ModeArg::Auto => WitnessMode::Auto,
            ModeArg::Explicit => WitnessMode::Explicit,
            ModeArg::Counted => WitnessMode::Counted,
        },
        sample_size,
        seed: g.seed,
        workers: g.workers,
    };
    let report = match theorem {
        1 => extract_thm1(&config, k, &opts),
        _ => extract_thm2(&config, k, &opts),
    }
    .map_err(witness_error)?;
    let csv_name = format!("witnesses_thm{theorem}.csv");
    let streamed = g.out.is_some() && report.witnesses.is_enumerated();
    if streamed {
        emit(g, &csv_name, &witnesses_csv(&report)?)?;
    }
    let json = witness_json(&report, streamed.then_some(csv_name.as_str()));
    emit(g, &format!("witness_thm{theorem}.json"), &pretty(&json))?;
    if report.theorem_claim_holds() == Some(false) {
        return Err(CliError::CheckFailed("witness family falls short inside the guaranteed range".into()));
    }
    Ok(())
}

fn solver_options(g: &Global, cap: u64) -> SolverOptions {
    SolverOptions { budget: g.budget, workers: g.workers, cap, ..Default::default() }
}

fn cmd_solve(g: &Global, n: usize, k: usize, cap: u64) -> Result<(), CliError> {
    let r = exact_a_with(n, k, &solver_options(g, cap)).map_err(solver_error)?;
    let target = binomial(n as u64 - 1, k as i64 - 1);
    let v = json!({
        "n": n,
        "k": k,
        "A": r.a_value.to_string(),
        "target": target.to_string(),
        "equals_target": r.exact.then_some(r.a_value == target),
        "exact": r.exact,
        "lower_bound": r.lower_bound.to_string(),
        "optimal_config": config_json(&r.optimal_config),
        "minimal_elements": subsets_json(&r.optimal_family.minimal_elements),
        "family_size": r.optimal_family.size,
        "nodes": r.nodes_explored,
        "certificates_checked": r.certificates_checked,
    });
    emit(g, &format!("solve_n{n}_k{k}.json"), &pretty(&v))
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Equality => "equality",
        Verdict::Counterexample => "counterexample",
        Verdict::Undecided => "undecided",
    }
}

fn cmd_sweep(g: &Global, k: usize, n_lo: usize, n_hi: usize, cap: u64) -> Result<(), CliError> {
    if n_lo > n_hi {
        return Err(CliError::Usage(format!("empty range {n_lo}..={n_hi}")));
    }
    let rows = verify_conjecture_range(n_lo, n_hi, k, &solver_options(g, cap)).map_err(solver_error)?;
    let file = format!("sweep_k{k}_n{n_lo}-{n_hi}");
    if g.format == Some(Format::Json) {
        let rows: Vec<Value> = rows
            .iter()
            .map(|r| {
                json!({
                    "n": r.n,
                    "k": r.k,
                    "target": r.target.to_string(),
                    "lower": r.lower.to_string(),
                    "upper": r.upper.to_string(),
                    "verdict": verdict_str(r.verdict),
                    "method": r.method,
                    "config": r.config.as_ref().map(config_json),
                })
            })
            .collect();
        return emit(g, &format!("{file}.json"), &pretty(&Value::Array(rows)));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "k", "target", "lower", "upper", "verdict", "method", "config"])
        .map_err(anyhow::Error::from)?;
    for r in &rows {
        let config = r
            .config
            .as_ref()
            .map(|c| c.values().iter().map(mms_core::numerics::format_rational).collect::<Vec<_>>().join(";"))
            .unwrap_or_default();
        w.write_record([
            r.n.to_string(),
            r.k.to_string(),
            r.target.to_string(),
            r.lower.to_string(),
            r.upper.to_string(),
            verdict_str(r.verdict).to_string(),
            r.method.to_string(),
            config,
        ])
        .map_err(anyhow::Error::from)?;
    }
    emit(g, &format!("{file}.csv"), &csv_string(w)?)
}

fn cmd_upper(g: &Global, n: usize, k: usize, strategy: &str) -> Result<(), CliError> {
    let s: Strategy = strategy.parse().map_err(CliError::Usage)?;
    let u = search_upper_bound(n, k, s, g.seed).map_err(solver_error)?;
    let v = json!({
        "n": n,
        "k": k,
        "strategy": strategy,
        "upper_bound": u.count.to_string(),
        "target": binomial(n as u64 - 1, k as i64 - 1).to_string(),
        "config": config_json(&u.config),
    });
    emit(g, &format!("upper_n{n}_k{k}.json"), &pretty(&v))
}

struct Params(BTreeMap<String, String>);

impl Params {
    fn usize(&self, key: &str) -> Result<usize, CliError> {
        let v = self
            .0
            .get(key)
            .ok_or_else(|| CliError::Usage(format!("missing parameter {key}")))?;
        v.parse().map_err(|_| CliError::Parse(format!("parameter {key}: not an integer: {v:?}")))
    }

    fn rational(&self, key: &str) -> Result<mms_core::Rational, CliError> {
        let v = self
            .0
            .get(key)
            .ok_or_else(|| CliError::Usage(format!("missing parameter {key}")))?;
        parse_rational(v).map_err(|e| CliError::Parse(format!("parameter {key}: {e}")))
    }
}

fn report_failed(r: &BoundReport) -> bool {
    r.precondition_met && !r.all_hold()
}

fn cmd_check(
    g: &Global,
    inequality: Option<&str>,
    suite: Option<&str>,
    params: &[(String, String)],
    n: Option<usize>,
    k: Option<usize>,
) -> Result<(), CliError> {
    let mut p: BTreeMap<String, String> = params.iter().cloned().collect();
    if let Some(n) = n {
        p.insert("n".into(), n.to_string());
    }
    if let Some(k) = k {
        p.insert("k".into(), k.to_string());
    }
    let p = Params(p);
    let (name, value, failed) = if let Some(s) = suite {
        let reports = match s {
            "thm1" => suite_thm1(p.usize("n")?, p.usize("k")?),
            "thm2" => suite_thm2(p.usize("n")?, p.usize("k")?),
            other => return Err(CliError::Usage(format!("unknown suite {other:?}"))),
        }
        .map_err(bounds_error)?;
        let failed = reports.iter().any(report_failed);
        (format!("suite_{s}"), serde_json::to_value(&reports).map_err(anyhow::Error::from)?, failed)
    } else {
        let name = inequality.expect("clap requires one of the two");
        let report = match name {
            "unimodal_gap" => {
                let m = p.usize("m")?;
                let m = u32::try_from(m).map_err(|_| CliError::Usage("m too large".into()))?;
                unimodal_gap_lb(&p.rational("p")?, &p.rational("q")?, m)
            }
            "thm1_threshold" => thm1_threshold_check(p.usize("n")?, p.usize("k")?),
            "thm2_stage" => thm2_stage_check(p.usize("n")?, p.usize("k")?, p.usize("p")?),
            "thm2_first_stage_binomial" => thm2_first_stage_binomial(p.usize("n")?, p.usize("k")?),
            "few_negatives" => few_negatives_check(p.usize("n")?, p.usize("k")?),
            "thm2_range" => thm2_range_check(p.usize("n")?, p.usize("k")?),
            "thm2_two_range_count" => thm2_two_range_count(p.usize("n")?, p.usize("k")?),
            "careful_estimate" => {
                let c = careful_estimate_claim(p.usize("k")?, p.usize("n_max")?);
                let v = serde_json::to_value(c).map_err(anyhow::Error::from)?;
                emit(g, "check_careful_estimate.json", &pretty(&v))?;
                return Ok(());
            }
            "f_bound" => {
                let f = f_bound_values(p.usize("k")?).map_err(bounds_error)?;
                let v = json!({
                    "k": f.k,
                    "old_bound": f.old_bound.to_string(),
                    "new_bound_lo": f.new_bound_lo,
                    "new_bound_hi": f.new_bound_hi,
                    "new_bound_float": f.new_bound_float,
                    "new_vs_old": format!("{:?}", f.new_vs_old).to_lowercase(),
                });
                emit(g, "check_f_bound.json", &pretty(&v))?;
                return Ok(());
            }
            other => return Err(CliError::Usage(format!("unknown inequality {other:?}"))),
        }
        .map_err(bounds_error)?;
        let failed = report_failed(&report);
        (name.to_string(), serde_json::to_value(&report).map_err(anyhow::Error::from)?, failed)
    };
    emit(g, &format!("check_{name}.json"), &pretty(&value))?;
    if failed {
        return Err(CliError::CheckFailed(format!("{name}: inequality does not hold")));
    }
    Ok(())
}

/// `paper.json` bytes and the checks behind them.
pub struct ReproduceOutput {
    pub report: String,
    pub checks: Vec<Check>,
}

/// Serializes the check list. Contains nothing that varies between runs
/// with the same seed.
pub fn render_report(seed: u64, checks: &[Check]) -> String {
    let passed = checks.iter().filter(|c| c.passed()).count();
    pretty(&json!({
        "suite": "mms-reproduce",
        "seed": seed,
        "summary": {"total": checks.len(), "passed": passed, "failed": checks.len() - passed},
        "checks": checks,
    }))
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn cmd_reproduce(g: &Global, soundness_configs: usize, command_line: &str) -> Result<(), CliError> {
    let fault = g
        .inject_fault
        .as_deref()
        .filter(|s| !s.is_empty())
        .map(str::parse::<Fault>)
        .transpose()
        .map_err(CliError::Usage)?;
    let opts = SuiteOptions { seed: g.seed, workers: g.workers, fault, soundness_configs };
    let checks = run_suite(&opts);
    let out = ReproduceOutput { report: render_report(g.seed, &checks), checks };
    let dir = g.out.clone().unwrap_or_else(|| "report".into());
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("paper.json"), &out.report)?;
    let manifest = json!({
        "command": command_line,
        "seed": g.seed,
        "workers": g.workers,
        "fault": g.inject_fault,
        "versions": {
            "mms-cli": env!("CARGO_PKG_VERSION"),
            "mms-core": mms_core::VERSION,
        },
        "created_at": chrono::Utc::now().to_rfc3339(),
        "files": {"paper.json": {"sha256": sha256_hex(out.report.as_bytes())}},
    });
    fs::write(dir.join("manifest.json"), pretty(&manifest))?;
    for c in &out.checks {
        let mark = if c.passed() { "PASS" } else { "FAIL" };
        println!("{mark} {} lhs={} rhs={}", c.id, c.lhs, c.rhs);
    }
    let failed: Vec<&str> = out.checks.iter().filter(|c| !c.passed()).map(|c| c.id.as_str()).collect();
    if failed.is_empty() {
        println!("all {} checks passed; report in {}", out.checks.len(), dir.display());
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!("{} checks failed: {}", failed.len(), failed.join(", "))))
    }
}
