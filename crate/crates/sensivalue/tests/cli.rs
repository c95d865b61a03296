//! Binary-level tests: golden report snapshot, exit codes and diagnostics.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn golden() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sensivalue"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn golden_analyze_report() {
    let units = fixtures().join("units.csv");
    let benchmarks = fixtures().join("benchmarks.csv");
    let out = run(&[
        "analyze",
        units.to_str().unwrap(),
        benchmarks.to_str().unwrap(),
        "--seed",
        "42",
        "--draws",
        "20000",
    ]);
    assert!(out.status.success());
    let expected = std::fs::read(golden().join("analyze.json")).unwrap();
    if std::env::var("UPDATE_GOLDEN").is_ok() {
        std::fs::write(golden().join("analyze.json"), &out.stdout).unwrap();
        return;
    }
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(expected).unwrap(),
        "analyze report drifted from the golden snapshot (set UPDATE_GOLDEN=1 after validating)"
    );
}

#[test]
fn analyze_csv_format_is_parseable() {
    let units = fixtures().join("units.csv");
    let benchmarks = fixtures().join("benchmarks.csv");
    let out = run(&[
        "analyze",
        units.to_str().unwrap(),
        benchmarks.to_str().unwrap(),
        "--format",
        "csv",
        "--draws",
        "5000",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        vec!["event_name", "method", "lower", "upper", "level", "fallback"]
    );
    let rows: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 14 * 4);
    for row in &rows {
        let lower: f64 = row[2].parse().unwrap();
        let upper: f64 = row[3].parse().unwrap();
        assert!(1.0 <= lower && lower <= upper);
    }
}

#[test]
fn missing_file_is_a_data_error() {
    let out = run(&["analyze", "nope.csv", "also-nope.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn schema_violation_reports_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let units = dir.path().join("units.csv");
    std::fs::write(
        &units,
        "event_name,y,r,propensity\na,1.0,1,0.5\na,2.0,1,1.7\n",
    )
    .unwrap();
    let benchmarks = dir.path().join("benchmarks.csv");
    std::fs::write(&benchmarks, "event_name,mu_source1,mu_source2\na,1.0,1.0\n").unwrap();
    let out = run(&[
        "analyze",
        units.to_str().unwrap(),
        benchmarks.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains(":3:"), "missing line number: {stderr}");
    assert!(stderr.contains("propensity"), "missing field name: {stderr}");
}

#[test]
fn empty_benchmarks_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let units = dir.path().join("units.csv");
    std::fs::write(&units, "event_name,y,r,propensity\na,1.0,1,0.5\n").unwrap();
    let benchmarks = dir.path().join("benchmarks.csv");
    std::fs::write(&benchmarks, "event_name,mu_source1,mu_source2\n").unwrap();
    let out = run(&[
        "analyze",
        units.to_str().unwrap(),
        benchmarks.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("no benchmark groups"), "{stderr}");
}

#[test]
fn usage_errors_exit_2() {
    let out = run(&["analyze"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["density", "--variant", "bogus", "--eta", "1", "--tau", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_smoke_run_is_fast_and_valid() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("study.toml");
    std::fs::write(
        &config,
        "n_units = 200\nk_multipliers = [1]\nn_trials = 10\ndraws = 500\n",
    )
    .unwrap();
    let started = std::time::Instant::now();
    let out = run(&["simulate", "--config", config.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(started.elapsed().as_secs() < 5, "smoke run too slow");
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(reader.records().count(), 4);
}

#[test]
fn simulate_seed_flag_repeats_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("study.toml");
    std::fs::write(
        &config,
        "n_units = 300\nk_multipliers = [1]\nn_trials = 20\ndraws = 1000\n",
    )
    .unwrap();
    let args = [
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "99",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn density_subcommand_emits_expected_grid() {
    let out = run(&[
        "density",
        "--variant",
        "normal",
        "--eta",
        "0.0",
        "--tau",
        "5.494505494505495",
        "--p-obs",
        "0.8",
        "--sd-y",
        "1.0",
        "--v-min",
        "1.01",
        "--v-max",
        "10",
        "--points",
        "50",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 51);
    // sigma_rr = 0.91 * 0.2 * tau = 1, so the folded mass at v = 10 is ~0.903
    let last: Vec<f64> = text
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((last[2] - 0.9032).abs() < 0.001, "cdf endpoint {}", last[2]);

    let out = run(&[
        "density", "--variant", "invgamma", "--eta", "0.8", "--tau", "0.008", "--mu-q", "0.3",
        "--sigma-q", "0.003", "--alpha", "50", "--beta", "25", "--points", "1", "--v-min", "1.5",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
}
