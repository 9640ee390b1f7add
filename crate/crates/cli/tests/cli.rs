use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bergman"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn json_rows(args: &[&str]) -> Vec<Value> {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    match serde_json::from_slice(&out.stdout).expect("json output") {
        Value::Array(rows) => rows,
        other => panic!("expected array, got {other}"),
    }
}

fn num(row: &Value, key: &str) -> f64 {
    row[key].as_f64().unwrap_or_else(|| panic!("missing {key} in {row}"))
}

#[test]
fn moments_n1_degree2_has_three_exact_rows() {
    let rows = json_rows(&["moments", "--n", "1", "--N", "2"]);
    assert_eq!(rows.len(), 3);
    for (a, row) in rows.iter().enumerate() {
        let expect = std::f64::consts::PI / (a as f64 + 1.0);
        assert!((num(row, "exact_value") - expect).abs() <= 1e-15 * expect);
        assert!(row["mc_estimate"].is_null());
    }
    assert_eq!(rows[2]["exact"], "(1/3)*pi");
}

#[test]
fn moments_monte_carlo_within_three_sigma() {
    let rows = json_rows(&["moments", "--n", "1", "--N", "2", "--mc", "1e6"]);
    for row in &rows {
        let err = (num(row, "mc_estimate") - num(row, "exact_value")).abs();
        let se = num(row, "mc_std_error");
        // the constant integrand has zero variance, so the estimate must be exact
        assert!(if se == 0.0 { err <= 1e-15 * num(row, "exact_value") } else { err < 3.0 * se }, "{row}");
        assert_eq!(row["mc_within_3se"], true);
    }
}

#[test]
fn zero_eps_is_a_usage_error() {
    let out = run(&["moments", "--eps", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--eps"));
}

#[test]
fn unknown_flag_and_bad_mc_exit_two() {
    assert_eq!(run(&["moments", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["moments", "--mc", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["kernel", "--radii", "1.0"]).status.code(), Some(2));
}

#[test]
fn kernel_residuals_and_origin_value() {
    let rows = json_rows(&["kernel"]);
    assert_eq!(rows.len(), 6);
    for row in &rows {
        assert!(num(row, "rel_residual") < 1e-8, "{row}");
    }
    let origin = rows.iter().find(|r| r["n"] == 2 && num(r, "radius") == 0.0).unwrap();
    assert_eq!(num(origin, "closed"), 2.0 / std::f64::consts::PI.powi(2));
}

#[test]
fn output_is_byte_stable() {
    for format in ["csv", "json"] {
        let a = run(&["kernel", "--format", format]);
        let b = run(&["kernel", "--format", format]);
        assert_eq!(a.stdout, b.stdout);
        assert!(!a.stdout.is_empty());
    }
    let a = run(&["moments", "--n", "2", "--N", "1", "--mc", "20000", "--seed", "5"]);
    let b = run(&["moments", "--n", "2", "--N", "1", "--mc", "20000", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_header_matches_json_keys() {
    let out = run(&["kernel", "--n", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "n,radius,N,closed,series,rel_residual");
}

#[test]
fn curvature_hand_values_and_homogeneity() {
    let one = json_rows(&["curvature", "--n", "1", "--eps", "1"]);
    for row in &one {
        let alpha: f64 = row["alpha"].as_str().unwrap().trim_matches(|c| c == '(' || c == ')').parse().unwrap();
        assert!((num(row, "value") - 2.0 * (alpha + 1.0)).abs() < 1e-12);
    }
    let half = json_rows(&["curvature", "--n", "1", "--eps", "0.5"]);
    for (a, b) in one.iter().zip(&half) {
        assert!((num(b, "value") - 4.0 * num(a, "value")).abs() < 1e-12 * num(b, "value"));
    }
    for row in json_rows(&["curvature"]) {
        assert!(num(&row, "residual") < 1e-10, "{row}");
        assert!(num(&row, "lower") <= num(&row, "value") && num(&row, "value") <= num(&row, "upper"));
    }
}

#[test]
fn verify_default_passes() {
    let out = run(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn verify_single_suite() {
    let rows = json_rows(&["verify", "--suite", "ladder-bounds"]);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["suite"], "ladder-bounds");
    assert_eq!(rows[0]["passed"], true);
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn every_mutation_fails_verify() {
    for m in ["flip-sign01", "flip-sign10", "degree-offset01", "degree-offset10", "axis-offset01", "axis-offset10"] {
        let out = run(&["verify", "--suite", "curvature,gauss-codazzi", "--mutate", m]);
        assert_eq!(out.status.code(), Some(1), "mutation {m} survived");
        assert!(String::from_utf8_lossy(&out.stderr).contains("FAILED"));
    }
    let out = run(&["verify", "--suite", "gauss-codazzi", "--mutate", "flip-sign10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gauss-codazzi"));
}

#[test]
fn perturb_zero_jet_has_no_deviation() {
    let jet = fixture("zero_jet.json");
    let rows = json_rows(&["perturb", "--jet", jet.to_str().unwrap()]);
    assert_eq!(rows.len(), 3);
    for row in &rows {
        assert_eq!(num(row, "deviation_ratio"), 0.0);
        assert_eq!(num(row, "uniform_deviation"), 0.0);
        assert_eq!(num(row, "total_re"), num(row, "model"));
    }
}

#[test]
fn perturb_sample_jet_halves() {
    let jet = fixture("sample_jet.json");
    let rows = json_rows(&["perturb", "--jet", jet.to_str().unwrap()]);
    let eps: Vec<f64> = rows.iter().map(|r| num(r, "eps")).collect();
    assert_eq!(eps, vec![0.4, 0.2, 0.1]);
    for row in &rows[1..] {
        let h = num(row, "halving");
        assert!((0.3..=0.7).contains(&h), "halving {h}");
    }
}

#[test]
fn perturb_rejects_missing_and_malformed_jets() {
    assert_eq!(run(&["perturb"]).status.code(), Some(2));
    assert_eq!(run(&["perturb", "--jet", "/nonexistent/jet.json"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n": 2, "M": 1, "r_conv": 1.0}"#).unwrap();
    assert_eq!(run(&["perturb", "--jet", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("table.json");
    std::fs::write(&cfg, format!("n = [1]\nN = [3]\nformat = \"json\"\nout = {:?}\n", out.to_str().unwrap())).unwrap();
    let status = run(&["moments", "--config", cfg.to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(0));
    assert!(status.stdout.is_empty());
    let rows: Vec<Value> = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 4);

    let status = run(&["moments", "--config", cfg.to_str().unwrap(), "--N", "1"]);
    assert_eq!(status.status.code(), Some(0));
    let rows: Vec<Value> = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);

    std::fs::write(&cfg, "typo = 1\n").unwrap();
    assert_eq!(run(&["moments", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}
