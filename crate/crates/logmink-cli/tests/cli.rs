//! Integration tests for the `logmink` binary: exit codes, file formats,
//! round trips, determinism.

use std::path::Path;
use std::process::{Command, Output};

fn logmink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logmink"))
        .args(args)
        .output()
        .expect("spawn logmink")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SQUARE_MEASURE: &str = r#"{ "dim": 2, "atoms": [
  { "u": [1, 0], "gamma": 1.0 },
  { "u": [-1, 0], "gamma": 1.0 },
  { "u": [0, 1], "gamma": 1.0 },
  { "u": [0, -1], "gamma": 1.0 }
] }"#;

const VIOLATED_MEASURE: &str = r#"{ "dim": 2, "atoms": [
  { "u": [1, 0], "gamma": 2.0 },
  { "u": [-1, 0], "gamma": 2.0 },
  { "u": [0, 1], "gamma": 1.0 },
  { "u": [0, -1], "gamma": 1.0 }
] }"#;

const HEMISPHERE_MEASURE: &str = r#"{ "dim": 2, "atoms": [
  { "u": [1, 0], "gamma": 1.0 },
  { "u": [0, 1], "gamma": 1.0 }
] }"#;

#[test]
fn validate_exit_codes_and_output() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(dir.path(), "ok.json", SQUARE_MEASURE);
    let out = logmink(&["validate", &ok]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["status"], "EQUALITY_OK");
    assert_eq!(doc["hemisphere_ok"], true);
    assert_eq!(doc["witnesses"].as_array().unwrap().len(), 2);

    let bad = write(dir.path(), "bad.json", VIOLATED_MEASURE);
    let out = logmink(&["validate", &bad]);
    assert_eq!(out.status.code(), Some(2));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["status"], "FAIL");

    let hemi = write(dir.path(), "hemi.json", HEMISPHERE_MEASURE);
    let out = logmink(&["validate", &hemi]);
    assert_eq!(out.status.code(), Some(2));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["hemisphere_ok"], false);
    assert!(doc["witness_direction"].as_array().unwrap().len() == 2);
}

#[test]
fn malformed_json_exits_64() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "broken.json", "{ not json");
    let out = logmink(&["validate", &path]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn solve_then_conemeasure_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", SQUARE_MEASURE);
    let p = dir.path().join("p.json");
    let out = logmink(&["solve", "--measure", &m, "--out", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert!(doc["residual"].as_f64().unwrap() <= 1e-8);
    assert_eq!(doc["dim"], 2);
    assert!((doc["volume"].as_f64().unwrap() - 4.0).abs() < 1e-8);

    let out = logmink(&["conemeasure", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let nu: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let atoms = nu["atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 4);
    for a in atoms {
        assert!((a["gamma"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
    }
}

#[test]
fn solve_writes_a_trace_for_strict_instances() {
    let dir = tempfile::tempdir().unwrap();
    let triangle = r#"{ "dim": 2, "atoms": [
      { "u": [0, 1], "gamma": 1.0 },
      { "u": [-0.8660254037844386, -0.5], "gamma": 1.0 },
      { "u": [0.8660254037844387, -0.5], "gamma": 1.0 }
    ] }"#;
    let m = write(dir.path(), "tri.json", triangle);
    let p = dir.path().join("p.json");
    let t = dir.path().join("trace.csv");
    let out = logmink(&[
        "solve",
        "--measure",
        &m,
        "--out",
        p.to_str().unwrap(),
        "--trace",
        t.to_str().unwrap(),
        "--strict-only",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&t).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "iter,objective,residual_inf,step,min_support"
    );
    assert!(lines.count() >= 2);
}

#[test]
fn strict_only_rejects_equality_cases() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", SQUARE_MEASURE);
    let out = logmink(&["solve", "--measure", &m, "--strict-only"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plot_square_and_dimension_guard() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", SQUARE_MEASURE);
    let p = dir.path().join("p.json");
    logmink(&["solve", "--measure", &m, "--out", p.to_str().unwrap()]);
    let svg_path = dir.path().join("fig.svg");
    let out = logmink(&["plot", p.to_str().unwrap(), "--out", svg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
    // Four corners in the polygon.
    let poly = svg.lines().find(|l| l.starts_with("<polygon")).unwrap();
    assert_eq!(poly.matches(',').count(), 4);

    let interval = r#"{ "dim": 1, "atoms": [
      { "u": [1], "gamma": 3.0 }, { "u": [-1], "gamma": 2.0 } ] }"#;
    let m1 = write(dir.path(), "m1.json", interval);
    let p1 = dir.path().join("p1.json");
    logmink(&["solve", "--measure", &m1, "--out", p1.to_str().unwrap()]);
    let out = logmink(&["plot", p1.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(65));
}

#[test]
fn check_ineq_is_deterministic_and_job_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let r1 = dir.path().join("r1.csv");
    let r2 = dir.path().join("r2.csv");
    let r4 = dir.path().join("r4.csv");
    for (path, jobs) in [(&r1, "1"), (&r2, "1"), (&r4, "3")] {
        let out = logmink(&[
            "check-ineq",
            "--random",
            "12",
            "--dim",
            "2",
            "--seed",
            "9",
            "--jobs",
            jobs,
            "--report",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read_to_string(&r1).unwrap();
    assert_eq!(a, std::fs::read_to_string(&r2).unwrap());
    assert_eq!(a, std::fs::read_to_string(&r4).unwrap());
    // No violations in the sweep.
    for line in a.lines().skip(1) {
        let slack: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
        assert!(slack >= -1e-9);
    }
}

#[test]
fn one_dimensional_solve_matches_the_base_case() {
    let dir = tempfile::tempdir().unwrap();
    let interval = r#"{ "dim": 1, "atoms": [
      { "u": [1], "gamma": 3.0 }, { "u": [-1], "gamma": 2.0 } ] }"#;
    let m = write(dir.path(), "m.json", interval);
    let p = dir.path().join("p.json");
    let out = logmink(&["solve", "--measure", &m, "--out", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert!((doc["volume"].as_f64().unwrap() - 5.0).abs() < 1e-12);
}
