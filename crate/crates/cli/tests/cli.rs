use std::process::{Command, Output};

use serde_json::Value;

fn svrelax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_svrelax")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = svrelax(&full);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    });
    (v, out.status.code().unwrap())
}

fn bound(i: &str, s: &str, sc: &str) -> f64 {
    let (v, code) = json(&["bound", "--indeterminism", i, "--signaling", s, "--scenario", sc]);
    assert_eq!(code, 0);
    v["bound"].as_f64().unwrap()
}

#[test]
fn bound_examples() {
    assert_eq!(bound("0", "0", "simultaneous"), 4.0);
    assert!((bound("0.1", "0.2", "simultaneous") - 5.2).abs() < 1e-12);
    assert_eq!(bound("0.1", "0.9", "send"), 8.0);
    assert!((bound("0.15", "0.1", "receive") - 4.6).abs() < 1e-12);
}

#[test]
fn bound_rejects_out_of_range_input() {
    let out = svrelax(&["bound", "--indeterminism", "0.6", "--signaling", "0", "--scenario", "simultaneous"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn figure_rows() {
    let out = svrelax(&["figure1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("I,X,Y,Z"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 100);
    assert_eq!(rows[0], vec![0.0, 4.0, 4.0, 4.0]);
    let at = rows.iter().find(|r| (r[0] - 0.45).abs() < 1e-9).unwrap();
    assert!((at[1] - 8.0).abs() < 1e-12 && (at[2] - 7.6).abs() < 1e-12 && (at[3] - 5.8).abs() < 1e-12);
    for r in &rows {
        assert!((4.0..=8.0).contains(&r[1]) && (4.0..8.0).contains(&r[2]) && (4.0..6.0).contains(&r[3]));
    }
}

#[test]
fn figure_output_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(svrelax(&["figure1", "--out", a.to_str().unwrap()]).status.success());
    assert!(svrelax(&["figure1", "--out", b.to_str().unwrap()]).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn ghz_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ghz.json");
    let p = path.to_str().unwrap();
    let (emit, code) = json(&["ghz", "--emit", p]);
    assert_eq!(code, 0);
    assert!((emit["svetlichny"].as_f64().unwrap().abs() - 4.0 * 2f64.sqrt()).abs() < 1e-9);
    let (m, code) = json(&["metrics", p]);
    assert_eq!(code, 0);
    assert!(m["signaling"]["overall"].as_f64().unwrap().abs() < 1e-12);
    assert!((m["indeterminism"]["overall"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(m["complementarity"]["holds"], Value::Bool(true));
}

#[test]
fn malformed_behavior_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"states\": [1, 2").unwrap();
    let out = svrelax(&["metrics", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ghz_maximum() {
    let out = svrelax(&["ghz", "--maximize"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("5.6568542"), "{text}");
}

#[test]
fn requirements_table() {
    let (v, code) = json(&["requirements", "--all"]);
    assert_eq!(code, 0);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for r in rows {
        let req = &r["requirement"];
        let (i, s) = (req["i_v"].as_f64().unwrap(), req["s_v"].as_f64().unwrap());
        assert!((s - (1.0 - 2.0 * i)).abs() < 1e-12);
    }
}

#[test]
fn oracle_exit_codes() {
    let budget = ["--indeterminism", "0.1", "--signaling", "0.35", "--scenario", "simultaneous"];
    let mut args = vec!["oracle"];
    args.extend(budget);
    let (v, code) = json(&args);
    assert_eq!(code, 0);
    assert!((v["j_min"].as_f64().unwrap() - 1.4).abs() < 1e-9);

    args.extend(["--node-limit", "3"]);
    assert_eq!(svrelax(&args).status.code(), Some(3));

    let (v, code) = json(&["oracle", "--indeterminism", "0.15", "--signaling", "0.6", "--scenario", "receive"]);
    assert_eq!(code, 4);
    assert_eq!(v["matches"], Value::Bool(false));

    let out = svrelax(&["oracle", "--indeterminism", "0.1", "--signaling", "0.35", "--scenario", "simultaneous", "--threads", "0"]);
    assert_eq!(out.status.code(), Some(2));
}
