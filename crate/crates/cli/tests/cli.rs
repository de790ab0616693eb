//! End-to-end runs of the `shiftlab` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn shiftlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shiftlab")).args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = shiftlab(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn result<'a>(doc: &'a Value, task: &str) -> &'a Value {
    let t = doc["tasks"].as_array().unwrap().iter().find(|t| t["task"] == task).unwrap_or_else(|| panic!("no task {task}"));
    &t["result"]
}

fn conclusions(doc: &Value) -> Vec<String> {
    result(doc, "dynamics")["conclusions"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_string()).collect()
}

/// Rows of a CSV table, skipping `#` comment lines.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn chaos_preset_is_chaotic_with_essential_radius_eight() {
    let doc = ok_json(&["run", "--preset", "EX-CHAOS", "--tasks", "dynamics,decompose"]);
    let tasks: Vec<&str> = doc["tasks"].as_array().unwrap().iter().map(|t| t["task"].as_str().unwrap()).collect();
    assert_eq!(tasks, ["dynamics", "decompose"]);
    assert!(conclusions(&doc).iter().any(|c| c == "CHAOTIC"));
    let radii = &result(&doc, "decompose")["essential_radii"];
    assert_eq!(radii["alpha_limit"].as_f64(), Some(8.0));
    for side in ["inner", "outer"] {
        let r = radii[side].as_f64().unwrap();
        assert!((r - 8.0).abs() < 0.05, "{side} {r}");
    }
}

#[test]
fn tridiagonal_demo_distances_halve() {
    let out = shiftlab(&["run", "--preset", "EX-TRIDIAG", "--tasks", "orbit-demo", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# scenario_hash "));
    let rows = csv_rows(&text);
    let d: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(d.len() >= 10);
    for w in d.windows(2).take(30) {
        assert!((w[1] / w[0] - 0.5).abs() < 1e-9, "{w:?}");
    }
}

#[test]
fn empty_task_list_gives_empty_report() {
    let doc = ok_json(&["run", "--preset", "EX-HC", "--tasks", ""]);
    assert_eq!(doc["tasks"].as_array().unwrap().len(), 0);
    assert_eq!(doc["scenario_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn chaos_space_has_radius_two() {
    let doc = ok_json(&["space", "info", "--preset", "EX-CHAOS"]);
    let r = &result(&doc, "space")["radius"];
    assert_eq!(r["value"].as_f64(), Some(2.0));
    assert_eq!(r["cert"], "CERTIFIED");
}

#[test]
fn rank_one_demo_first_coordinate() {
    let doc = ok_json(&["demo", "rank-one", "--lambda", "i", "--steps", "2"]);
    let first = &result(&doc, "rank-one")["orbit"][0];
    assert_eq!(first[0].as_f64(), Some(-1.0));
    assert_eq!(first[1].as_f64(), Some(0.0));
}

#[test]
fn decaying_weights_are_not_hypercyclic() {
    let doc = ok_json(&["dynamics", "check", "--preset", "EX-DECAY"]);
    let c = conclusions(&doc);
    assert!(c.iter().any(|c| c == "NOT_HYPERCYCLIC"), "{c:?}");
    assert!(!c.iter().any(|c| c == "HYPERCYCLIC"));
}

#[test]
fn identical_scenarios_give_identical_bytes() {
    let args = ["run", "--preset", "EX-HC", "--tasks", "space,norm,dynamics", "--size", "64"];
    let (a, b) = (shiftlab(&args), shiftlab(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    // floats carry 17 significant digits
    assert!(text.contains("e0") && !text.contains("\"p\": 2,"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["space", "info", "--preset", "EX-HC", "--bogus"][..],
        &["run", "--preset", "EX-HC", "--tasks", "space,nope"],
        &["run", "--preset", "EX-NOPE", "--tasks", "space"],
        &["run", "--tasks", "space"],
        &["space", "info", "--preset", "EX-HC", "--p", "0.5"],
        &["space", "info", "--preset", "EX-HC", "--format", "xml"],
        &["run", "--scenario", "/nonexistent/scenario.json"],
    ] {
        let out = shiftlab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn broken_task_contract_exits_one() {
    // eigen-tails need unit weights; EX-CHAOS has w = 4
    let out = shiftlab(&["orbit", "demo", "--preset", "EX-CHAOS"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("orbit-demo"));
}

#[test]
fn failing_verdicts_still_exit_zero() {
    let doc = ok_json(&["dynamics", "check", "--preset", "EX-DECAY"]);
    let verdicts: Vec<&str> = result(&doc, "dynamics")["reports"].as_array().unwrap().iter().map(|r| r["verdict"].as_str().unwrap()).collect();
    assert!(verdicts.iter().any(|v| *v != "HOLDS"), "{verdicts:?}");
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn scenario_files_drive_runs() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let sc = write(
        dir.path(),
        "sc.json",
        &format!(
            r#"{{"preset": "EX-TRIDIAG(i)", "space": {{"n": 64}}, "tasks": ["matrix", "orbit"],
               "params": {{"nu": 2, "vector": "e:3", "steps": 3}}, "output": {{"path": {:?}}}}}"#,
            report.to_str().unwrap()
        ),
    );
    let out = shiftlab(&["run", "--scenario", sc.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["scenario"]["space"]["n"], 64);
    assert_eq!(doc["scenario"]["params"]["nu"], 2);
    assert_eq!(doc["tasks"][0]["task"], "matrix");
    assert_eq!(doc["tasks"][1]["task"], "orbit");

    // --size overrides the file and changes the hash
    let small_path = dir.path().join("small.json");
    let out = shiftlab(&["run", "--scenario", sc.to_str().unwrap(), "--size", "32", "--out", small_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let small: Value = serde_json::from_str(&std::fs::read_to_string(&small_path).unwrap()).unwrap();
    assert_eq!(small["scenario"]["space"]["n"], 32);
    assert_ne!(small["scenario_hash"], doc["scenario_hash"]);

    let bad = write(dir.path(), "bad.json", r#"{"preset": "EX-HC", "colour": "blue"}"#);
    assert_eq!(shiftlab(&["run", "--scenario", bad.to_str().unwrap()]).status.code(), Some(2));
    let both = write(dir.path(), "both.json", r#"{"preset": "EX-HC", "triple": {"a": 1, "b": 1, "w": 1}}"#);
    assert_eq!(shiftlab(&["run", "--scenario", both.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn csv_output_writes_one_table_per_task() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("tables");
    let out = shiftlab(&["run", "--preset", "EX-TRIDIAG", "--tasks", "space,matrix,orbit-demo", "--size", "32", "--format", "csv", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut names: Vec<String> = std::fs::read_dir(&out_dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["00-space.csv", "00-space.plot.csv", "01-matrix.csv", "02-orbit-demo.csv", "02-orbit-demo.plot.csv"]);
    let matrix = std::fs::read_to_string(out_dir.join("01-matrix.csv")).unwrap();
    assert!(matrix.lines().nth(1) == Some("i,j,re,im"));
    let plot = std::fs::read_to_string(out_dir.join("02-orbit-demo.plot.csv")).unwrap();
    assert_eq!(csv_rows(&plot)[0].len(), 2);
}
