use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hardylab"));
    cmd.env_remove("HARDYLAB_CHECKPOINTS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

fn assert_valid(v: &Value) {
    let validator = schema();
    let errors: Vec<String> = validator.iter_errors(v).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "schema errors: {errors:#?}");
}

#[test]
fn eval_arithmetic() {
    let v = json(&run(&["eval", "--mean", "arithmetic", "--vector", "1,2,3"]));
    assert_eq!(v["value"], 2.0);
    assert_eq!(v["config"]["command"], "eval");
    assert_valid(&v);
}

#[test]
fn hardy_constant_square_root_mean() {
    let v = json(&run(&["hardy-constant", "--mean", "power:0.5", "--n", "1000000"]));
    let last = v["final"].as_f64().unwrap();
    assert!((last - 4.0).abs() < 1e-2, "{last}");
    assert_eq!(v["verdict"], "converged");
    assert_valid(&v);
}

#[test]
fn counterexample_refusal_exits_zero() {
    let v = json(&run(&["counterexample", "--mean", "power:0.5", "--seq", "harmonic"]));
    assert_eq!(v["status"], "refused");
    assert_eq!(v["stage"], "divergence");
    assert_eq!(v["divergence"]["holds"], "fails");
    assert_valid(&v);
}

#[test]
fn counterexample_constructed() {
    let v = json(&run(&["counterexample", "--mean", "arithmetic", "--n", "20000"]));
    assert_eq!(v["status"], "constructed");
    assert_eq!(v["certificates"]["holds"], true);
    assert_eq!(v["case"], "CaseTwo");
    assert_valid(&v);
}

#[test]
fn every_command_validates() {
    let cases: &[&[&str]] = &[
        &["axioms", "--mean", "max"],
        &["hardy-constant", "--mean", "geometric", "--n", "10000"],
        &["hardy-ratio", "--mean", "power:0.5", "--seq", "power:2", "--n", "1000"],
        &["ratios", "--mean", "geometric", "--n", "500"],
        &["test-hardy", "--mean", "arithmetic", "--n", "10000"],
        &["test-weak-hardy", "--mean", "arithmetic", "--n", "10000", "--s-grid", "0.5,2"],
        &["lemma1", "--mean", "arithmetic", "--n", "1000"],
        &["lemma1", "--mean", "min", "--n", "100"],
        &["eval", "--mean", "quasi:log(x)", "--vector", "1,4"],
    ];
    for args in cases {
        let v = json(&run(args));
        assert_valid(&v);
    }
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["eval", "--mean", "foo", "--vector", "1"],
        &["eval", "--mean", "quasi:log(", "--vector", "1"],
        &["ratios", "--mean", "arithmetic", "--s-grid", "1"],
        &["eval", "--mean", "arithmetic"],
        &["eval", "--mean", "arithmetic", "--vector", "1,-2"],
        &["hardy-constant", "--mean", "geometric", "--n", "10"],
        &["axioms", "--mean", "max", "--output", "csv"],
        &["hardy-constant"],
        &["bogus"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn numerical_fault_exits_three() {
    let out = run(&["ratios", "--mean", "arithmetic", "--seq", "custom:1/(n-1)", "--n", "10"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bad_checkpoint_env_is_usage_error() {
    let out = bin()
        .args(["hardy-constant", "--mean", "geometric", "--n", "10000"])
        .env("HARDYLAB_CHECKPOINTS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

fn temp_dir() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

fn write(path: &Path, text: &str) -> PathBuf {
    std::fs::write(path, text).unwrap();
    path.to_path_buf()
}

#[test]
fn precedence_env_file_flag() {
    let dir = temp_dir();
    let cfg = write(
        &dir.path().join("cfg.json"),
        r#"{"mean": {"family": "geometric"}, "n": 20000, "checkpoints_per_decade": 3}"#,
    );
    let cfg = cfg.to_str().unwrap();

    let env_only = bin()
        .args(["hardy-constant", "--mean", "geometric", "--n", "10000"])
        .env("HARDYLAB_CHECKPOINTS", "4")
        .output()
        .unwrap();
    assert_eq!(json(&env_only)["config"]["checkpoints_per_decade"], 4.0);

    let file_over_env = bin()
        .args(["hardy-constant", "--config", cfg])
        .env("HARDYLAB_CHECKPOINTS", "4")
        .output()
        .unwrap();
    let v = json(&file_over_env);
    assert_eq!(v["config"]["checkpoints_per_decade"], 3.0);
    assert_eq!(v["config"]["n"], 20000);
    assert_eq!(v["config"]["tol"], 1e-3);

    let v = json(&run(&["hardy-constant", "--config", cfg, "--n", "30000", "--mean", "arithmetic"]));
    assert_eq!(v["config"]["n"], 30000);
    assert_eq!(v["config"]["mean"]["family"], "arithmetic");
}

#[test]
fn report_config_reruns_identically() {
    let dir = temp_dir();
    let out = dir.path().join("report.json");
    let out_s = out.to_str().unwrap();
    let status = bin()
        .args(["test-weak-hardy", "--mean", "power:0.25", "--n", "5000", "--s-grid", "1,3", "--out", out_s])
        .env("HARDYLAB_CHECKPOINTS", "5")
        .status()
        .unwrap();
    assert!(status.success());
    let first = std::fs::read(&out).unwrap();
    // the echoed config names the same output path, so the re-run overwrites it
    let status = bin().args(["--config", out_s]).status().unwrap();
    assert!(status.success());
    assert_eq!(first, std::fs::read(&out).unwrap());
    assert_valid(&serde_json::from_slice(&first).unwrap());
}

#[test]
fn mean_from_file() {
    let dir = temp_dir();
    let spec = write(&dir.path().join("mean.json"), r#"{"family": "power", "p": 2.0}"#);
    let arg = format!("file:{}", spec.display());
    let v = json(&run(&["eval", "--mean", &arg, "--vector", "1,7"]));
    assert_eq!(v["value"], 5.0);
    assert_eq!(v["config"]["mean"]["p"], 2.0);
}

#[test]
fn csv_outputs() {
    let out = run(&["counterexample", "--mean", "arithmetic", "--n", "1000", "--output", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,b_n,sum_b,mean_sum,certificate"));
    assert_eq!(text.lines().count(), 1001);
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "1");
    // 17 significant digits
    let mantissa = row[1].split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17);
    assert_eq!(row[4], "true");

    let out = run(&["lemma1", "--mean", "arithmetic", "--n", "1000", "--output", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("k,boundary,weight,inf_c,r_block\n0,0,"));

    let out = run(&["ratios", "--mean", "arithmetic", "--n", "10", "--output", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n,value\n1,1.0000000000000000e0\n2,1.5000000000000000e0\n"));
}

#[test]
fn out_path_written_atomically() {
    let dir = temp_dir();
    let out = dir.path().join("ratios.csv");
    let status = bin()
        .args(["ratios", "--mean", "geometric", "--n", "100", "--output", "csv", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(entries.len(), 1, "no temporary files left behind");
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 101);
}

#[test]
fn reports_are_deterministic() {
    let args = ["axioms", "--mean", "power:0.5", "--seed", "7"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}
