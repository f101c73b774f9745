use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nlyoung::frac_calc::gamma;
use serde_json::Value;

fn nlyoung(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlyoung")).args(args).output().expect("binary runs")
}

fn write_spec(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

const TX: &str = r#"{"name": "tx", "field": "id*id", "path": "id",
    "regularity": {"tau": 1, "lambda": 1, "gamma": 1}, "interval": [0, 1],
    "tolerances": {"expected": 0.5}}"#;

#[test]
fn spec_run_agrees_across_methods() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "tx.json", TX);
    let out = dir.path().join("out");
    let o = nlyoung(&["run", "--spec", &spec, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(r["pass"], true);
    let reports = r["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    for rep in reports {
        assert!((rep["value"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    }
    assert!(r["wall_clock_ms"].is_number());
    assert_eq!(r["spec"]["regularity"]["alpha"], 0.5);
}

#[test]
fn inadmissible_spec_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let body = TX.replace(r#""tau": 1, "lambda": 1"#, r#""tau": 0.2, "lambda": 0.5"#);
    let spec = write_spec(dir.path(), "bad.json", &body);
    let o = nlyoung(&["run", "--spec", &spec]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("must exceed 1"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_spec_key_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "bad.json", &TX.replace(r#""name""#, r#""nmae": 1, "name""#));
    assert_eq!(nlyoung(&["run", "--spec", &spec]).status.code(), Some(2));
}

#[test]
fn space_independent_field_gives_the_plain_increment() {
    let o = nlyoung(&["integrate", "--field", "sin*const:c=1", "--path", "id", "--tau", "1", "--lambda", "1", "--gamma", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    for rep in r.as_array().unwrap() {
        assert!((rep["value"].as_f64().unwrap() - 1f64.sin()).abs() < 1e-6, "{rep}");
    }
}

#[test]
fn reduction_suite_passes() {
    let o = nlyoung(&["suite", "reduction", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["pass"], true);
    assert_eq!(r["runs"].as_array().unwrap().len(), 3);
}

#[test]
fn unknown_suite_exits_with_two() {
    let o = nlyoung(&["suite", "colours"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown suite"));
}

#[test]
fn failed_tolerance_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "wrong.json", &TX.replace(r#""expected": 0.5"#, r#""expected": 0.6"#));
    let o = nlyoung(&["run", "--spec", &spec]);
    assert_eq!(o.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["pass"], false);
}

#[test]
fn outputs_are_byte_identical_without_timestamps() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "tx.json", TX);
    let runs: Vec<Vec<u8>> = (0..2)
        .map(|k| {
            let out = dir.path().join(format!("run{k}"));
            let o = nlyoung(&["run", "--spec", &spec, "--no-timestamp", "--out", out.to_str().unwrap()]);
            assert_eq!(o.status.code(), Some(0));
            fs::read(out.join("report.json")).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    let text = String::from_utf8(runs[0].clone()).unwrap();
    assert!(!text.contains("runtime_ms") && !text.contains("wall_clock_ms"));
}

#[test]
fn out_directory_holds_only_finished_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/out");
    let o = nlyoung(&[
        "indefinite", "--field", "id*id", "--path", "id", "--tau", "1", "--lambda", "1", "--gamma", "1", "--points", "33",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mut names: Vec<String> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    assert_eq!(names, ["indefinite.json", "indefinite_path.csv"]);
    let csv = fs::read_to_string(out.join("indefinite_path.csv")).unwrap();
    assert_eq!(csv.lines().count(), 34);
}

#[test]
fn bounds_writes_one_row_per_interval() {
    let o = nlyoung(&[
        "bounds", "--check", "centered", "--field", "id*id", "--path", "id", "--tau", "1", "--lambda", "1", "--gamma", "1",
        "--j-max", "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("j,interval,lhs,rhs1,rhs2,ratio"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn iterate_reproduces_the_factorial() {
    let o = nlyoung(&["iterate", "--fields", "id*const:c=1", "--n", "3", "--method", "sewing"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((r["value"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-5);
    assert_eq!(r["stage_stats"].as_array().unwrap().len(), 3);
}

#[test]
fn frac_weyl_derivative_of_a_power() {
    let o = nlyoung(&["frac", "--op", "weyl-left", "--f", "poly:c=0/0/1", "--alpha", "0.4"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let exact = 2.0 / gamma(2.6);
    assert!((r["value"].as_f64().unwrap() - exact).abs() < 1e-5);
}

