use std::path::Path;

use angval_cli::{load_polytope, load_quadratic, run};
use serde_json::Value;

fn report(args: &[&str], dir: &Path) -> (i32, Value) {
    let out = dir.join("report.json");
    let mut argv = vec!["angval"];
    argv.extend_from_slice(args);
    let out_s = out.to_str().unwrap().to_string();
    argv.extend_from_slice(&["--out", &out_s]);
    let code = run(argv).unwrap();
    let text = std::fs::read_to_string(&out).unwrap();
    (code, serde_json::from_str(&text).unwrap())
}

fn strip_clock(mut v: Value) -> Value {
    v["wall_clock_seconds"] = Value::Null;
    v
}

#[test]
fn intrinsic_cube() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = report(&["intrinsic", "--shape", "cube", "--n", "4", "--k", "2"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(r["result"]["value"].as_f64().unwrap(), 6.0);
    assert_eq!(r["result"]["stderr"].as_f64().unwrap(), 0.0);
}

#[test]
fn dimension_formula() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = report(&["dimension", "--n", "4", "--k", "2", "--assert"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(r["result"]["dimension"].as_u64().unwrap(), 20);
    assert_eq!(r["verdict"], "pass");
}

#[test]
fn relation_verdicts_and_assert() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = report(&["relation", "--f", "hw:1,0", "--n", "4", "--trials", "5", "--assert"], dir.path());
    assert_eq!((code, r["verdict"].as_str().unwrap()), (0, "pass"));
    let (code, r) = report(&["relation", "--f", "hw:2,0", "--n", "4", "--trials", "5"], dir.path());
    assert_eq!((code, r["verdict"].as_str().unwrap()), (0, "fail"));
    let (code, _) = report(&["relation", "--f", "hw:2,0", "--n", "4", "--trials", "5", "--assert"], dir.path());
    assert_eq!(code, 1);
}

#[test]
fn counterexample_f20() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = report(&["counterexample", "--case", "f20-n4", "--assert"], dir.path());
    assert_eq!(code, 0);
    assert!(r["result"]["max_abs_residual"].as_f64().unwrap() > 1e-2);
    assert!(r["result"]["max_oracle_gap"].as_f64().unwrap() < 1e-9);
}

#[test]
fn counterexample_n5_reports_both_families() {
    let dir = tempfile::tempdir().unwrap();
    let (_, r) = report(&["counterexample", "--case", "n5-hw33"], dir.path());
    assert!(r["result"]["first_family_max_abs_residual"].as_f64().unwrap() < 1e-9);
    assert!(r["result"]["second_family_max_abs_residual"].is_f64());
    assert!(r["result"]["max_oracle_gap"].as_f64().unwrap() < 1e-9);
}

#[test]
fn simplex_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = report(&["simplex", "--n", "4", "--f", "star:quad-rand:2", "--seed", "5", "--assert"], dir.path());
    assert_eq!(code, 0);
    assert!(r["result"]["experiment"]["abs_error_vs_comp2"].as_f64().unwrap() < 1e-5);
    let gap = &r["result"]["comp2_minus_comp1"];
    assert!(gap[0].as_f64().unwrap().abs() < 1e-10 && gap[1].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let code = run(["angval", "counterexample", "--case", "f20-n4", "--format", "csv", "--out", out.to_str().unwrap()])
        .unwrap();
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "phi,residual_re,residual_im,oracle_re,oracle_im,oracle_gap");
    assert_eq!(lines.count(), 16);
}

#[test]
fn deterministic_reports() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["evaluate", "--f", "quad-rand:1", "--shape", "cross-polytope", "--n", "3", "--k", "1", "--samples", "4000", "--seed", "9"];
    let (_, a) = report(&args, dir.path());
    let (_, b) = report(&args, dir.path());
    assert_eq!(strip_clock(a), strip_clock(b));
}

#[test]
fn polytope_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square.json");
    std::fs::write(&path, r#"{"n": 2, "vertices": [[0,0],[1,0],[0,1],[1,1]]}"#).unwrap();
    assert_eq!(load_polytope(&path).unwrap().vertices().len(), 4);
    let spec = format!("file:{}", path.display());
    let (_, r) = report(&["intrinsic", "--shape", &spec, "--n", "2", "--k", "1"], dir.path());
    assert_eq!(r["result"]["value"].as_f64().unwrap(), 2.0);

    std::fs::write(&path, r#"{"n": 2, "vertices": [[0,0],[2,0],[0,2],[1,1]]}"#).unwrap();
    assert!(load_polytope(&path).is_err(), "non-extreme vertex accepted");
    std::fs::write(&path, r#"{"n": 2, "vertices": [[0,0],[1,0,3]]}"#).unwrap();
    assert!(load_polytope(&path).is_err());
    std::fs::write(&path, r#"{"n": 2, "verts": []}"#).unwrap();
    let err = format!("{:#}", load_polytope(&path).unwrap_err());
    assert!(err.contains("vertices"), "{err}");
}

#[test]
fn quadratic_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.json");
    std::fs::write(&path, "[[1,0,0],[0,1,0],[0,0,1]]").unwrap();
    let q = load_quadratic(&path, 3, 1).unwrap();
    assert_eq!(q.matrix().nrows(), 3);
    let spec = format!("quad:{}", path.display());
    let (_, r) = report(&["evaluate", "--f", &spec, "--shape", "cube", "--n", "3", "--k", "1"], dir.path());
    assert!((r["result"]["value"][0].as_f64().unwrap() - 3.0).abs() < 1e-12);

    std::fs::write(&path, "[[1,2,0],[0,1,0],[0,0,1]]").unwrap();
    let q = load_quadratic(&path, 3, 1).unwrap();
    assert_eq!(q.matrix()[(0, 1)].re, 1.0);
    std::fs::write(&path, "[[1,0],[0,1]]").unwrap();
    assert!(load_quadratic(&path, 3, 1).is_err());
}

#[test]
fn usage_errors() {
    assert!(run(["angval", "bogus"]).is_err());
    assert!(run(["angval", "evaluate", "--f", "hw:1,0", "--shape", "cube", "--n", "4"]).is_err());
    assert!(run(["angval", "evaluate", "--f", "nope", "--shape", "cube", "--n", "3", "--k", "1"]).is_err());
    assert!(run(["angval", "intrinsic", "--shape", "dodecahedron", "--n", "3"]).is_err());
    assert!(run(["angval", "counterexample", "--case", "unknown"]).is_err());
    assert!(run(["angval", "simplex", "--t-grid", "1e-4:1e-2"]).is_err());
}
