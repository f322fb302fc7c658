use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qmono(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmono"))
        .args(args)
        .env_remove("QMONO_THREADS")
        .output()
        .expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = qmono(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    path_str(&p).to_owned()
}

const BELL: &str = r#"{
  "kind": "pure",
  "dims": [2, 2],
  "data": [[0.7071067811865476, 0], [0, 0], [0, 0], [0.7071067811865476, 0]]
}"#;

#[test]
fn ghz_has_unit_ckw_deficit() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("ghz.json");
    json_ok(&["gen", "ghz", "--out", path_str(&file)]);
    let r = json_ok(&["monogamy", "--state", path_str(&file), "--measure", "C", "--alpha", "2"]);
    assert!((r["deficit"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((r["e_abc"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(r["gamma"].as_f64(), Some(0.0));
    assert_eq!(r["disentangling_satisfied"], Value::Bool(false));
}

#[test]
fn w_state_saturates_ckw() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("w.json");
    let third = (1.0f64 / 3.0).sqrt().to_string();
    json_ok(&["gen", "wclass", "--lambdas", &format!("{third},{third},{third},0"), "--out", path_str(&file)]);
    let r = json_ok(&["monogamy", "--state", path_str(&file), "--measure", "concurrence", "--alpha", "2"]);
    assert!(r["deficit"].as_f64().unwrap().abs() < 1e-10);
    assert!((r["gamma"].as_f64().unwrap() - 2.0).abs() < 1e-8);
}

#[test]
fn bell_measures() {
    let dir = TempDir::new().unwrap();
    let bell = write(&dir, "bell.json", BELL);
    let g = json_ok(&["measure", "--state", &bell, "--measure", "g_concurrence"]);
    assert!((g["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let c = json_ok(&["measure", "--state", &bell, "--cut", "0|1", "--measure", "C"]);
    assert!((c["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let e = json_ok(&["measure", "--state", &bell, "--measure", "entropy"]);
    assert!((e["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn mixed_two_qubit_roof_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("rho.json");
    json_ok(&["--seed", "11", "gen", "random", "--dims", "2,2", "--rank", "3", "--out", path_str(&file)]);
    let m = json_ok(&["measure", "--state", path_str(&file), "--measure", "C"]);
    let cf = m["c_formation"].as_f64().unwrap();
    let ca = m["c_assistance"].as_f64().unwrap();
    let min = json_ok(&["roof", "--state", path_str(&file), "--measure", "C", "--mode", "min"]);
    let max = json_ok(&["roof", "--state", path_str(&file), "--measure", "C", "--mode", "max"]);
    assert!((min["value"].as_f64().unwrap() - cf).abs() < 1e-6);
    assert!((max["value"].as_f64().unwrap() - ca).abs() < 1e-6);
}

#[test]
fn csv_output() {
    let dir = TempDir::new().unwrap();
    let bell = write(&dir, "bell.json", BELL);
    let out = qmono(&["--output", "csv", "measure", "--state", &bell, "--measure", "N"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("measure,cut,value"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..2], ["N", "0|1"]);
    assert!((row[2].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn generation_is_deterministic() {
    let a = qmono(&["--seed", "7", "gen", "markov"]);
    let b = qmono(&["--seed", "7", "gen", "markov"]);
    let c = qmono(&["--seed", "8", "gen", "markov"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn generated_state_round_trips_through_stdout() {
    let dir = TempDir::new().unwrap();
    let out = qmono(&["--seed", "3", "gen", "gmono", "--d", "3", "--r", "2"]);
    assert!(out.status.success());
    let file = write(&dir, "g.json", std::str::from_utf8(&out.stdout).unwrap());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["kind"], "density");
    assert_eq!(v["dims"], serde_json::json!([3, 3]));
    json_ok(&["measure", "--state", &file, "--measure", "N"]);
}

#[test]
fn verify_ckw_passes() {
    let out = qmono(&["--samples", "50", "verify", "ckw"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let rows: Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["passed"] == Value::Bool(true)));
}

#[test]
fn exponent_reports_w_maximizer() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("max.json");
    let r = json_ok(&["--samples", "40", "exponent", "--measure", "C", "--out", path_str(&file)]);
    assert!((r["alpha_hat"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert_eq!(r["maximizer"], "w");
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(saved, r["maximizer_state"]);
}

#[test]
fn malformed_file_reports_line() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{\n  \"kind\": \"pure\",\n  \"dims\": [2, 2],\n  \"data\": [[1, 0], [0 0]]\n}\n");
    let out = qmono(&["measure", "--state", &bad, "--measure", "C"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.json:4:"), "{err}");
}

#[test]
fn wrong_trace_is_an_invariant_violation() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "trace.json", r#"{"kind": "density", "dims": [2], "data": [[0.5, 0], [0, 0], [0, 0], [0.4, 0]]}"#);
    let out = qmono(&["measure", "--state", &bad, "--cut", "0|0", "--measure", "C"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("InvariantViolation") && err.contains("trace"), "{err}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qmono(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(qmono(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qmono(&["gen", "ghz", "--dims", "2,x"]).status.code(), Some(2));
    assert_eq!(qmono(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_sets_output_and_flags_override() {
    let dir = TempDir::new().unwrap();
    let bell = write(&dir, "bell.json", BELL);
    let cfg = write(&dir, "cfg.json", r#"{"output": "csv", "roof": {"restarts": 2}}"#);
    let out = qmono(&["--config", &cfg, "measure", "--state", &bell, "--measure", "C"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("measure,cut,value\n"));
    let out = qmono(&["--config", &cfg, "--output", "json", "measure", "--state", &bell, "--measure", "C"]);
    serde_json::from_slice::<Value>(&out.stdout).unwrap();
    let bad = write(&dir, "bad.json", r#"{"sed": 3}"#);
    assert_eq!(qmono(&["--config", &bad, "gen", "ghz"]).status.code(), Some(2));
}
