use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_jacobi-bif"));
    cmd.env_remove("JACOBI_BIF_OUT_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

const FOLD_K1: &[&str] = &["trace", "--k", "1", "--alpha", "1", "--beta", "0", "--q", "2"];

#[test]
fn sphere_prints_exact_values() {
    let out = run(&["sphere", "--n", "3", "--d", "1", "--c", "0", "--q", "3", "--kmax", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for line in ["alpha = 1/2", "beta  = 1/2", "lambda_1 = 3/2", "lambda_2 = 4"] {
        assert!(text.lines().any(|l| l == line), "missing {line:?} in\n{text}");
    }

    let v = json(&run(&["sphere", "--n", "5", "--d", "2", "--c", "0", "--json"]));
    assert_eq!(v["alpha"], "1/2");
    assert_eq!(v["beta"], "1/2");
}

#[test]
fn sphere_rejects_invalid_degree() {
    let out = run(&["sphere", "--n", "3", "--d", "5", "--c", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("d = 5"));
}

#[test]
fn linearize_examples() {
    let v = json(&run(&["linearize", "--k", "2", "--alpha", "0", "--beta", "0", "--exact"]));
    assert_eq!(v["exact"]["coeffs"], serde_json::json!(["1/5", "0", "2/7", "0", "18/35"]));
    assert!((v["i3"].as_f64().unwrap() - 4.0 / 35.0).abs() < 1e-13);

    let v = json(&run(&["linearize", "--k", "1", "--alpha", "0", "--beta", "0", "--exact"]));
    assert_eq!(v["i3_sign"], "zero");

    let v = json(&run(&["linearize", "--k", "2", "--alpha", "3/2", "--beta", "1/2"]));
    let classes = v["classification"].as_array().unwrap();
    assert_eq!(classes.len(), 5);
    assert!(classes.iter().all(|c| c == "positive"));
}

#[test]
fn negative_degree_is_a_config_error() {
    let out = run(&["linearize", "--k", "-1", "--alpha", "0", "--beta", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn trace_reports_a_fold_and_matching_csv() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("b.json");
    let csv_path = dir.path().join("b.csv");
    let p = json_path.to_str().unwrap();
    let c = csv_path.to_str().unwrap();
    assert!(bin().args(FOLD_K1).args(["-o", p]).status().unwrap().success());
    assert!(bin().args(FOLD_K1).args(["--format", "csv", "-o", c]).status().unwrap().success());

    let v: Value = serde_json::from_str(&fs::read_to_string(&json_path).unwrap()).unwrap();
    let points = v["points"].as_array().unwrap();
    let folds = v["folds"].as_array().unwrap();
    assert_eq!(folds.len(), 1);
    let lambda_star = folds[0]["lambda_star"].as_f64().unwrap();
    assert!(lambda_star > 0.0 && lambda_star < 3.0);
    assert!(points[1]["lambda"].as_f64().unwrap() < points[0]["lambda"].as_f64().unwrap());

    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), points.len());
    for (row, point) in rows.iter().zip(points) {
        assert_eq!(row[1].parse::<f64>().unwrap(), point["lambda"].as_f64().unwrap());
        assert_eq!(&row[5], "1");
    }
}

#[test]
fn trace_is_deterministic() {
    let a = run(FOLD_K1);
    let b = run(FOLD_K1);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn trace_without_fold_bracket_still_writes_the_branch() {
    let v = json(&run(&[
        "trace", "--k", "2", "--alpha", "1/2", "--beta", "1/2", "--q", "3", "--max-steps", "4",
    ]));
    assert_eq!(v["points"].as_array().unwrap().len(), 5);
    assert!(v["folds"].as_array().unwrap().is_empty());
    assert!(v["points"].as_array().unwrap().iter().all(|p| p["crossings"] == 2));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["trace", "--kmax", "2", "--alpha", "3/2", "--beta", "1/2", "--q", "2"])
        .args(["--max-steps", "5", "--format", "csv"])
        .env("JACOBI_BIF_OUT_DIR", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["branch_k1_plus.csv", "branch_k2_plus.csv"]);
}

#[test]
fn verify_quadrature_passes() {
    let out = run(&["verify", "quadrature"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("PASS") && !text.contains("FAIL"), "{text}");
}

#[test]
fn verify_rejects_unknown_suite() {
    assert_eq!(run(&["verify", "nonsense"]).status.code(), Some(2));
}
