use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dpoinar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpoinar"))
        .args(args)
        .env_remove("DPOINAR_OUT")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = dpoinar(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn simulate(dir: &Path) {
    ok(&[
        "--out", path(dir), "simulate", "--scenario", "easy-0.5", "--seed", "7", "--series", "8", "--weeks", "40",
    ]);
}

#[test]
fn simulate_writes_panel_truth_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    simulate(dir.path());
    let counts = fs::read_to_string(dir.path().join("counts.csv")).unwrap();
    assert!(counts.starts_with("series_id,2001-01-01,2001-01-08"));
    assert_eq!(counts.lines().count(), 9);
    let truth: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("truth.json")).unwrap()).unwrap();
    assert_eq!(truth["state"]["z"].as_array().unwrap().len(), 8);
    assert_eq!(truth["seed"], 7);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["config"]["scenario"], "easy-0.5");
    assert_eq!(manifest["config"]["data_seed"], 7);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_dpoinar"))
        .args(["simulate", "--scenario", "single", "--series", "3", "--weeks", "20"])
        .env("DPOINAR_OUT", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("counts.csv").exists());
}

#[test]
fn fit_then_forecast_with_quantile_columns() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    simulate(d);
    let counts = d.join("counts.csv");
    let fit_dir = d.join("fit");
    ok(&[
        "--out", path(&fit_dir), "fit", "--counts", path(&counts), "--iterations", "100", "--burn-in", "20",
        "--chains", "2", "--seed", "3",
    ]);
    for f in ["draws.jsonl", "diagnostics.json", "clusters.csv", "manifest.json"] {
        assert!(fit_dir.join(f).exists(), "{f}");
    }
    let diagnostics: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(fit_dir.join("diagnostics.json")).unwrap()).unwrap();
    assert_eq!(diagnostics["n_draws"], 32);
    assert!(diagnostics["psrf"]["sum_rates"].as_f64().unwrap() >= 0.0);

    let fc_dir = d.join("forecast");
    ok(&[
        "--out", path(&fc_dir), "forecast", "--draws", path(&fit_dir.join("draws.jsonl")), "--counts",
        path(&counts), "--quantiles", "0.5,0.95,0.99", "--horizon", "2",
    ]);
    let table = fs::read_to_string(fc_dir.join("forecast.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(
        lines.next().unwrap(),
        "series_id,last,mean_h1,mean_h2,q0.5,q0.95,q0.99,lower0.95,upper0.95"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 8);
    for row in rows {
        let q: Vec<u64> = row[4..7].iter().map(|x| x.parse().unwrap()).collect();
        assert!(q[0] <= q[1] && q[1] <= q[2]);
        let (lo, hi): (u64, u64) = (row[7].parse().unwrap(), row[8].parse().unwrap());
        assert!(lo <= q[0] && q[0] <= hi);
    }
}

#[test]
fn covariate_fit_without_exposure_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    simulate(dir.path());
    let out = dpoinar(&[
        "--out", path(dir.path()), "fit", "--counts", path(&dir.path().join("counts.csv")), "--mode", "covariate",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("configuration error"));
}

#[test]
fn usage_errors_exit_with_status_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dpoinar(&["--out", path(dir.path()), "fit", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = dpoinar(&["--out", path(dir.path()), "fit", "--counts", "/definitely/not/here.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not exist"));
    let out = dpoinar(&["--out", path(dir.path()), "simulate", "--scenario", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let out = dpoinar(&["--out", path(dir.path()), "forecast", "--draws", "x", "--counts", "y", "--quantiles", "0.9,0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn data_errors_exit_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    let counts = dir.path().join("counts.csv");
    fs::write(&counts, "series_id,2001-01-01,2001-01-08\na,0,-1\n").unwrap();
    let out = dpoinar(&["--out", path(dir.path()), "fit", "--counts", path(&counts)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("column 3"));
}

#[test]
fn evaluate_and_study_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&[
        "--out", path(&d.join("eval")), "evaluate", "--synthetic", "--series", "30", "--weeks", "80",
        "--last-weeks", "3", "--iterations", "40", "--burn-in", "10",
    ]);
    let csv = fs::read_to_string(d.join("eval/evaluation.csv")).unwrap();
    assert!(csv.starts_with("statistic,method,"));
    assert!(csv.lines().last().unwrap().starts_with("frequency,"));

    ok(&[
        "--out", path(&d.join("study")), "study", "--scenarios", "single", "--replicates", "1", "--iterations",
        "40", "--burn-in", "10",
    ]);
    let csv = fs::read_to_string(d.join("study/study.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("single,"));
}
