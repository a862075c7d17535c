use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn nidsbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nidsbench")).args(args).output().unwrap()
}

fn data_args() -> Vec<String> {
    vec![
        "--train".into(),
        fixture("unsw_train.csv"),
        "--test".into(),
        fixture("unsw_test.csv"),
        "--repeat".into(),
        "1".into(),
    ]
}

fn with_data<'a>(head: &[&'a str], data: &'a [String]) -> Vec<&'a str> {
    head.iter().copied().chain(data.iter().map(String::as_str)).collect()
}

fn stderr_error(out: &Output) -> Value {
    let line = String::from_utf8_lossy(&out.stderr);
    let last = line.lines().last().expect("stderr has an error line");
    serde_json::from_str(last).unwrap()
}

#[test]
fn run_prints_a_report() {
    let data = data_args();
    let out = nidsbench(&with_data(&["run", "--task", "multiclass", "--reducer", "extraction", "--k", "4"], &data));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["label"]["method"], "extraction");
    assert_eq!(report["label"]["k"], 4);
    assert_eq!(report["class_names"].as_array().unwrap().len(), 10);
    let f1 = report["f1"].as_f64().unwrap();
    assert!((0.0..=100.0).contains(&f1));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("c.conf");
    std::fs::write(
        &conf,
        format!(
            "train = {}\ntest = {}\nreducer = selection\nk = 8\nclassifier = mlp  # overridden\nrepeat = 1\n",
            fixture("unsw_train.csv"),
            fixture("unsw_test.csv")
        ),
    )
    .unwrap();
    let out = nidsbench(&["run", "--config", conf.to_str().unwrap(), "--classifier", "bernoulli_nb", "--k", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["label"]["classifier"], "bernoulli_nb");
    assert_eq!(report["label"]["k"], 4);
    assert_eq!(report["config"]["reducer"], "selection");
}

#[test]
fn errors_are_json_lines_with_nonzero_exit() {
    let out = nidsbench(&["run", "--train", "/nonexistent.csv", "--test", "/nonexistent.csv"]);
    assert!(!out.status.success());
    assert_eq!(stderr_error(&out)["error"], "ingest");

    let data = data_args();
    let out = nidsbench(&with_data(&["run", "--task", "ternary"], &data));
    assert!(!out.status.success());
    assert_eq!(stderr_error(&out)["error"], "config");

    let empty = tempfile::tempdir().unwrap();
    let out = nidsbench(&["compare", empty.path().to_str().unwrap()]);
    assert!(!out.status.success());
    assert_eq!(stderr_error(&out)["error"], "no_reports");
}

fn stdout_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn grid_then_report_then_compare() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let data = data_args();
    let out = nidsbench(&with_data(
        &[
            "grid",
            "--task",
            "binary",
            "--k",
            "4,8",
            "--classifier",
            "decision_tree,bernoulli_nb",
            "--out",
            root.to_str().unwrap(),
        ],
        &data,
    ));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = stdout_lines(&out);
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r["task"] == "binary"));
    assert!(root.join("tables/binary_k4.csv").is_file());
    assert!(root.join("tables/binary_per_class.csv").is_file());
    assert!(root.join("comparison.md").is_file());

    let tables = root.join("md");
    let runs = root.join("runs");
    let out = nidsbench(&["report", runs.to_str().unwrap(), "--format", "markdown", "--out", tables.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let written: Vec<&str> = std::str::from_utf8(&out.stdout).unwrap().lines().collect();
    assert_eq!(written.len(), 3);
    assert!(written.iter().all(|p| Path::new(p).is_file()));

    let out = nidsbench(&["compare", runs.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    let per_k = summary["tasks"][0]["per_k"].as_array().unwrap();
    assert_eq!(per_k.len(), 2);
}

#[test]
fn grid_failures_exit_with_code_two() {
    let data = data_args();
    let out = nidsbench(&with_data(
        &["grid", "--task", "binary", "--reducer", "extraction", "--k", "2,9999", "--classifier", "bernoulli_nb"],
        &data,
    ));
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_lines(&out).len(), 1);
    let err = stderr_error(&out);
    assert_eq!(err["error"], "reduction");
    assert!(err["cell"].as_str().unwrap().contains("extraction_k9999"));
}
