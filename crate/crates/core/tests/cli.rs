//! Black-box tests of the `gridstat` binary: exit codes, report contents,
//! file outputs, config/flag precedence.

use std::process::{Command, Output};

use gridstat::montecarlo::SimResult;
use gridstat::sweep::CurveSeries;

fn gridstat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridstat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn bounds_coupled_verdict_example() {
    let out = gridstat(&[
        "bounds",
        "--mass",
        "5.11e-4",
        "--big-mass",
        "1.22e19",
        "--mu",
        "1",
        "--displacement",
        "1e-2",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let delta_d = report["delta_d_m"].as_f64().unwrap();
    assert!((delta_d / 1.05e-12 - 1.0).abs() < 0.01, "delta_d {delta_d:e}");
    let verdicts = report["verdicts"].as_array().unwrap();
    let floor_check = verdicts
        .iter()
        .find(|v| v["check"].as_str().unwrap().starts_with("delta_d"))
        .unwrap();
    assert_eq!(floor_check["pass"], serde_json::Value::Bool(true));
    // transferred deviation clears the Compton floor by a factor ~2.7
    let ratio = delta_d / floor_check["required"].as_f64().unwrap();
    assert!(ratio > 2.0 && ratio < 3.5, "ratio {ratio}");
}

#[test]
fn bounds_independent_worst_accuracy() {
    let out = gridstat(&["bounds", "--mass", "1.22e19", "--mu", "1", "--format", "json"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let w = report["worst_accuracy"].as_f64().unwrap();
    assert!((w / 2.862e-10 - 1.0).abs() < 0.01, "worst accuracy {w:e}");
}

#[test]
fn bounds_text_report_mentions_verdict() {
    let out = gridstat(&[
        "bounds",
        "--mass",
        "5.11e-4",
        "--big-mass",
        "1.22e19",
        "--displacement",
        "1e-2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("coupled bounds"));
    assert!(text.contains("PASS"), "no verdict in:\n{text}");
}

#[test]
fn bounds_negative_mass_is_usage_error() {
    let out = gridstat(&["bounds", "--mass", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bounds_margin_below_one_is_usage_error() {
    let out = gridstat(&["bounds", "--mass", "1", "--margin", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_independent_json() {
    let out = gridstat(&[
        "simulate",
        "--mode",
        "independent",
        "--d-mean",
        "1e4",
        "--grid",
        "1",
        "--trials",
        "100000",
        "--seed",
        "42",
    ]);
    assert!(out.status.success());
    let result: SimResult = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(result.trials, 100_000);
    assert!(result.rel_deviation.unwrap() < 0.01);
}

#[test]
fn simulate_coupled_ratio_one_matches_independent() {
    let common = ["--d-mean", "1e4", "--trials", "20000", "--seed", "7"];
    let coupled = gridstat(
        &[
            &["simulate", "--mode", "coupled", "--grid-object", "1", "--mass-ratio", "1"],
            &common[..],
        ]
        .concat(),
    );
    let independent = gridstat(
        &[&["simulate", "--mode", "independent", "--grid", "1"], &common[..]].concat(),
    );
    assert!(coupled.status.success() && independent.status.success());
    let c: SimResult = serde_json::from_str(&stdout(&coupled)).unwrap();
    let i: SimResult = serde_json::from_str(&stdout(&independent)).unwrap();
    assert_eq!(c.empirical_mean, i.empirical_mean);
    assert_eq!(c.empirical_std, i.empirical_std);
}

#[test]
fn simulate_exact_guard_is_domain_error() {
    let out = gridstat(&[
        "simulate",
        "--mode",
        "independent",
        "--d-mean",
        "1e-15",
        "--grid",
        "1.616e-35",
        "--sampler",
        "exact",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(err["kind"], "domain");
}

#[test]
fn simulate_auto_falls_back_to_analytic() {
    let out = gridstat(&[
        "simulate",
        "--mode",
        "independent",
        "--d-mean",
        "1e-15",
        "--grid",
        "1.616255e-35",
        "--trials",
        "10",
    ]);
    assert!(out.status.success());
    let result: SimResult = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(result.analytic_only);
    assert!(result.empirical_std.is_none());
    assert!((result.predicted_std / 1.271e-25 - 1.0).abs() < 1e-3);
}

#[test]
fn figure_writes_series_and_landmarks() {
    let dir = tempfile::tempdir().unwrap();
    let out = gridstat(&[
        "figure",
        "--id",
        "1c",
        "--mu-list",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("fig1c"), "summary missing: {text}");
    // landmark values from the summary line
    assert!(text.contains("6.187"), "m=mu landmark missing: {text}");
    assert!(text.contains("2.16"), "m=m_P landmark missing: {text}");

    let path = dir.path().join("fig1c_mu1e0.json");
    let series: CurveSeries = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(series.points.len(), 400);
    assert!(series.floor.is_some());
}

#[test]
fn figure_csv_default_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = gridstat(&[
        "figure",
        "--id",
        "4",
        "--mu-list",
        "1",
        "--probe-mass",
        "5.11e-4",
        "--grid-points",
        "50",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("fig4_mu1e0.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "figure_id,mu_gev,alpha,beta,mass_gev,value,unit,floor"
    );
    assert_eq!(lines.count(), 50);
}

#[test]
fn figure_out_dir_from_env() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gridstat"))
        .args(["figure", "--id", "1b", "--mu-list", "1", "--grid-points", "20"])
        .env("GRIDSTAT_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("fig1b_mu1e0.csv").exists());
}

#[test]
fn figure_invalid_id_is_usage_error() {
    let out = gridstat(&["figure", "--id", "9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(&config, r#"{"trials": 5000, "seed": 11}"#).unwrap();

    let from_config = gridstat(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--mode",
        "independent",
        "--d-mean",
        "1e4",
    ]);
    assert!(from_config.status.success());
    let r: SimResult = serde_json::from_str(&stdout(&from_config)).unwrap();
    assert_eq!(r.trials, 5000);

    let overridden = gridstat(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--mode",
        "independent",
        "--d-mean",
        "1e4",
        "--trials",
        "2000",
    ]);
    let r: SimResult = serde_json::from_str(&stdout(&overridden)).unwrap();
    assert_eq!(r.trials, 2000);
}

#[test]
fn missing_subcommand_is_usage_error() {
    let out = gridstat(&[]);
    assert_eq!(out.status.code(), Some(2));
}
