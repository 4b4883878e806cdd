//! End-to-end tests of the `reduct` binary: flags, exit codes, stream
//! separation, and report round-trips.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use reduct::report::{BenchReport, CoreReport, EvaluateReport, RunReport};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_reduct"))
}

fn table4_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/table4.csv")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

#[test]
fn reduce_reports_the_worked_reduct() {
    let path = table4_path();
    let out = run(&["reduce", "--metric", "pr", "--epsilon", "0", "--verify", path.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let report: RunReport = serde_json::from_str(&stdout_str(&out)).expect("stdout is one JSON report");
    assert_eq!(report.dataset.n_objects, 8);
    assert_eq!(report.dataset.granule_count, 5);
    let names: Vec<&str> = report.result.reduct.iter().map(|a| a.name.as_str()).collect();
    assert_eq!(names, vec!["a1", "a2"]);
    assert_eq!(report.result.theta_full, -0.625);
    assert!(report.verify.is_some());

    // Round trip: parsing the emitted report reproduces all fields.
    let json = serde_json::to_string(&report).unwrap();
    let back: RunReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
}

#[test]
fn reduce_is_insensitive_to_parallelism_flags() {
    let path = table4_path();
    let base = run(&["reduce", "--metric", "pr", path.to_str().unwrap()]);
    let tuned = run(&[
        "reduce",
        "--metric",
        "pr",
        "--model-parallelism",
        "8",
        "--data-chunks",
        "4",
        path.to_str().unwrap(),
    ]);
    let a: RunReport = serde_json::from_str(&stdout_str(&base)).unwrap();
    let b: RunReport = serde_json::from_str(&stdout_str(&tuned)).unwrap();
    assert_eq!(a.result.reduct, b.result.reduct);
    assert_eq!(b.config.model_parallelism, 8);
    assert_eq!(b.config.data_chunks, 4);
}

#[test]
fn core_reports_significances() {
    let path = table4_path();
    let out = run(&["core", "--metric", "pr", "--verify", path.to_str().unwrap()]);
    assert!(out.status.success());
    let report: CoreReport = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report.theta_full, -0.625);
    let mut sigs: Vec<(String, f64)> = report
        .significances
        .iter()
        .map(|s| (s.attribute.name.clone(), s.significance))
        .collect();
    sigs.sort_by(|a, b| a.0.cmp(&b.0));
    assert_eq!(sigs[0].0, "a1");
    assert!((sigs[0].1 - 0.125).abs() < 1e-12);
    assert!((sigs[1].1 - 0.625).abs() < 1e-12);
    assert_eq!(report.core.len(), 2);
    assert!(report.significances.iter().all(|s| s.kind == "inner"));
}

#[test]
fn evaluate_prints_theta_and_verifies() {
    let path = table4_path();
    let out = run(&["evaluate", "--attrs", "a2", "--metric", "pr", "--verify", path.to_str().unwrap()]);
    assert!(out.status.success());
    let report: EvaluateReport = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report.theta, -0.5);
    assert_eq!(report.verify.unwrap().abs_diff, 0.0);

    // Indices resolve too.
    let out = run(&["evaluate", "--attrs", "0,1", "--metric", "pr", path.to_str().unwrap()]);
    let report: EvaluateReport = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report.theta, -0.625);

    // The empty subset evaluates the trivial partition.
    let out = run(&["evaluate", "--attrs", "", "--metric", "pr", path.to_str().unwrap()]);
    let report: EvaluateReport = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report.theta, 0.0);
    assert!(report.subset.is_empty());
}

#[test]
fn evaluate_rejects_unknown_attribute() {
    let path = table4_path();
    let out = run(&["evaluate", "--attrs", "nope", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stdout_str(&out).is_empty(), "data stream must stay clean on error");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("nope"), "stderr: {stderr}");
}

#[test]
fn gen_is_seed_deterministic() {
    let a = run(&["gen", "--objects", "8", "--attrs", "2", "--values", "2", "--classes", "2", "--seed", "7"]);
    let b = run(&["gen", "--objects", "8", "--attrs", "2", "--values", "2", "--classes", "2", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout_str(&a).lines().count(), 8);

    let c = run(&["gen", "--objects", "8", "--attrs", "2", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn gen_feeds_reduce_through_a_file() {
    let dir = std::env::temp_dir().join(format!("reduct-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("gen.csv");

    let out = run(&[
        "gen",
        "--objects",
        "500",
        "--attrs",
        "6",
        "--values",
        "3",
        "--classes",
        "2",
        "--seed",
        "13",
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let report_path = dir.join("report.json");
    let out = run(&[
        "reduce",
        "--metric",
        "sce",
        "--output",
        report_path.to_str().unwrap(),
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout_str(&out).is_empty(), "--output moves the report off stdout");
    let report: RunReport = serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report.dataset.n_objects, 500);
    assert!(!report.result.reduct.is_empty());

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn constant_decision_yields_empty_reduct() {
    let dir = std::env::temp_dir().join(format!("reduct-cli-const-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("onec.csv");
    let out = run(&[
        "gen", "--objects", "50", "--attrs", "4", "--values", "2", "--classes", "1", "--seed", "3",
        "--output", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let out = run(&["reduce", "--metric", "pr", csv.to_str().unwrap()]);
    let report: RunReport = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(report.result.reduct.is_empty());
    assert_eq!(report.result.theta_full, -1.0);
    assert_eq!(report.result.theta_core, -1.0);

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn parse_errors_exit_nonzero_with_line_number() {
    let dir = std::env::temp_dir().join(format!("reduct-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("bad.csv");
    std::fs::write(&csv, "0,0,Y\n0,1\n").unwrap();

    let out = run(&["reduce", csv.to_str().unwrap()]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2"), "stderr: {stderr}");

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn reduce_reads_stdin() {
    use std::io::Write as _;
    let mut child = bin()
        .args(["reduce", "--metric", "pr", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"0,0,Y\n0,0,Y\n0,0,N\n0,1,Y\n0,1,Y\n0,1,Y\n1,0,N\n1,1,Y\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let report: RunReport = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report.result.reduct.len(), 2);
}

#[test]
fn missing_drop_policy_reports_dropped_rows() {
    let dir = std::env::temp_dir().join(format!("reduct-cli-miss-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("missing.csv");
    std::fs::write(&csv, "0,0,Y\n0,?,Y\n1,1,N\n?,1,N\n1,0,Y\n").unwrap();

    let out = run(&["reduce", "--missing", "drop", "--header", "no", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let report: RunReport = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report.dataset.n_objects, 3);
    assert_eq!(report.dataset.dropped_rows, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("dropped 2"));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bench_emits_a_timing_grid() {
    let dir = std::env::temp_dir().join(format!("reduct-cli-bench-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("bench.csv");
    let out = run(&[
        "gen", "--objects", "400", "--attrs", "10", "--values", "2", "--classes", "2", "--seed", "21",
        "--output", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let out = run(&[
        "bench",
        "--metric",
        "pr",
        "--levels",
        "1,2",
        "--chunks",
        "1,4",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: BenchReport = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report.rows.len(), 4);

    // Same reduct everywhere; the level-1 rows anchor the speedup column.
    let reference: Vec<usize> = report.rows[0].reduct.iter().map(|a| a.index).collect();
    for row in &report.rows {
        let reduct: Vec<usize> = row.reduct.iter().map(|a| a.index).collect();
        assert_eq!(reduct, reference);
    }
    for row in report.rows.iter().filter(|r| r.model_parallelism == 1) {
        assert_eq!(row.speedup_vs_level1, 1.0);
    }

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn decision_column_flag_moves_the_class() {
    let dir = std::env::temp_dir().join(format!("reduct-cli-dcol-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("classfirst.csv");
    std::fs::write(&csv, "Y,0,0\nY,0,0\nN,0,0\nY,0,1\nY,0,1\nY,0,1\nN,1,0\nY,1,1\n").unwrap();

    let out = run(&["reduce", "--metric", "pr", "--decision-col", "0", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let report: RunReport = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report.dataset.n_condition_attrs, 2);
    assert_eq!(report.result.theta_full, -0.625);
    assert_eq!(report.result.reduct.len(), 2);

    std::fs::remove_dir_all(&dir).ok();
}
