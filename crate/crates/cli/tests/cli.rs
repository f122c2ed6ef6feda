use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mms_core::Configuration;
use serde_json::Value;

fn mms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mms"))
        .args(args)
        .env_remove("MMS_SEED")
        .env_remove("MMS_INJECT_FAULT")
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&o.stdout))
    })
}

fn assert_schema(schema_file: &str, instance: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(schema_file);
    let schema: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let v = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = v.iter_errors(instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema_file}: {errors:?}");
}

#[test]
fn solve_five_two() {
    let o = mms(&["solve", "--n", "5", "--k", "2"]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["A"], "3");
    assert_eq!(v["equals_target"], false);
    assert_schema("solve.schema.json", &v);
}

#[test]
fn solve_output_ignores_workers() {
    let a = mms(&["solve", "--n", "7", "--k", "2", "--workers", "1"]);
    let b = mms(&["solve", "--n", "7", "--k", "2", "--workers", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn construct_counterexample_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let o = mms(&["construct", "--name", "counterexample", "--k", "3", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("mms_counterexample_n10_k3.txt")).unwrap();
    let c = Configuration::parse(&text).unwrap();
    assert_eq!(c.n(), 10);
    let meta: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("mms_counterexample_n10_k3.json")).unwrap()).unwrap();
    assert_eq!(meta["predicted_count"], "35");
    assert_schema("construct.schema.json", &meta);
}

#[test]
fn construct_star_to_stdout_and_witness_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let o = mms(&["construct", "--name", "star", "--n", "40", "--k", "2"]);
    assert!(o.status.success());
    let cfg = dir.path().join("star.txt");
    fs::write(&cfg, &o.stdout).unwrap();
    let o = mms(&["witness", "--config", cfg.to_str().unwrap(), "--k", "2", "--theorem", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["branch"], "central_at_top");
    assert_eq!(v["witnesses"]["count"], "39");
    assert_eq!(v["theorem_claim_holds"], true);
    assert_schema("witness.schema.json", &v);
}

#[test]
fn witness_counted_and_streamed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.txt");
    let mut text = "2\n".repeat(34);
    text.push_str(&"-11\n".repeat(6));
    fs::write(&cfg, text).unwrap();
    let out = dir.path().join("out");
    let o = mms(&[
        "witness", "--config", cfg.to_str().unwrap(), "--k", "2", "--theorem", "1", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(out.join("witness_thm1.json")).unwrap()).unwrap();
    assert_schema("witness.schema.json", &v);
    assert_eq!(v["witnesses_path"], "witnesses_thm1.csv");
    let mut rdr = csv::Reader::from_path(out.join("witnesses_thm1.csv")).unwrap();
    assert_eq!(rdr.records().count(), 57);

    let o = mms(&[
        "witness", "--config", cfg.to_str().unwrap(), "--k", "2", "--theorem", "1", "--mode", "counted",
        "--sample", "50",
    ]);
    let v = stdout_json(&o);
    assert_eq!(v["witnesses"]["enumerated"], false);
    assert_eq!(v["witnesses"]["samples"].as_array().unwrap().len(), 50);
    assert_schema("witness.schema.json", &v);
}

#[test]
fn malformed_config_exits_3_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.txt");
    fs::write(&cfg, "1\n2\nbanana\n").unwrap();
    let o = mms(&["witness", "--config", cfg.to_str().unwrap(), "--k", "2", "--theorem", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(mms(&["solve", "--n", "5", "--k", "2", "--bogus"]).status.code(), Some(2));
    assert_eq!(mms(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mms(&["construct", "--name", "nope", "--n", "4", "--k", "2"]).status.code(), Some(2));
    assert_eq!(mms(&["solve", "--n", "30", "--k", "3"]).status.code(), Some(2));
}

#[test]
fn check_suite_thm1() {
    let o = mms(&["check", "--suite", "thm1", "--k", "3", "--n", "270"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let v = stdout_json(&o);
    for r in v.as_array().unwrap() {
        assert_schema("bound_report.schema.json", r);
        assert_eq!(r["holds"], true, "{r}");
    }
}

#[test]
fn check_inequality_params() {
    let o = mms(&["check", "--inequality", "thm2_stage", "--params", "k=3", "n=5200", "p=1"]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_schema("bound_report.schema.json", &v);
    assert_eq!(v["parameters"]["p"], "1");

    // Below the threshold the first-term condition fails: exit 1.
    let o = mms(&["check", "--inequality", "thm1_threshold", "--params", "k=3", "n=100"]);
    assert_eq!(o.status.code(), Some(1));
    let o = mms(&["check", "--inequality", "nonsense", "--params", "k=3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_csv_round_trips_configs() {
    let o = mms(&["sweep", "--k", "2", "--n-lo", "4", "--n-hi", "7"]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    for row in &rows {
        let n: usize = row[0].parse().unwrap();
        let c = Configuration::parse(&row[7]).unwrap();
        assert_eq!(c.n(), n);
        let count = mms_core::count_nonneg_ksums(&c, 2).unwrap().count;
        assert_eq!(count.to_string(), row[4]);
    }
    assert_eq!(&rows[1][5], "counterexample");
    assert_eq!(&rows[0][5], "equality");
}

#[test]
fn baranyai_output_validates() {
    let dir = tempfile::tempdir().unwrap();
    let o = mms(&["baranyai", "--n", "9", "--k", "3", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let path = dir.path().join("baranyai_n9_k3.json");
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_schema("baranyai.schema.json", &v);
    assert_eq!(v["classes"].as_array().unwrap().len(), 28);
    assert!(mms(&["baranyai", "--validate", path.to_str().unwrap()]).status.success());

    let mut broken = v.clone();
    broken["classes"][0][0] = serde_json::json!([1, 2, 4]);
    let bad = dir.path().join("broken.json");
    fs::write(&bad, broken.to_string()).unwrap();
    assert_eq!(mms(&["baranyai", "--validate", bad.to_str().unwrap()]).status.code(), Some(1));
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(mms(&["baranyai", "--validate", bad.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn seed_flag_overrides_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_mms"));
        c.args(["upper", "--n", "9", "--k", "3", "--strategy", "anneal"]);
        if let Some(s) = flag {
            c.args(["--seed", s]);
        }
        c.env_remove("MMS_SEED");
        if let Some(e) = env {
            c.env("MMS_SEED", e);
        }
        c.output().unwrap().stdout
    };
    assert_eq!(run(Some("5"), None), run(None, Some("5")));
    assert_eq!(run(Some("9"), Some("5")), run(None, Some("5")));
}

#[test]
fn reproduce_with_fault_names_failures() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_mms"))
        .args(["reproduce", "--soundness-configs", "20", "--out", dir.path().to_str().unwrap()])
        .env("MMS_INJECT_FAULT", "binomial")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("multiple_of_k/n4_k2"), "{err}");
    assert!(err.contains("counterexample/k3"), "{err}");
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("paper.json")).unwrap()).unwrap();
    assert_schema("report.schema.json", &report);
    assert!(report["summary"]["failed"].as_u64().unwrap() > 0);
}

#[test]
fn reproduce_report_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = mms(&["reproduce", "--soundness-configs", "20", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let bytes = fs::read(dir.path().join("paper.json")).unwrap();
    let report: Value = serde_json::from_slice(&bytes).unwrap();
    assert_schema("report.schema.json", &report);
    assert!(report["checks"].as_array().unwrap().len() >= 15);
    let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_schema("manifest.schema.json", &manifest);
    use sha2::Digest;
    let digest: String = sha2::Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(manifest["files"]["paper.json"]["sha256"], digest);
}
