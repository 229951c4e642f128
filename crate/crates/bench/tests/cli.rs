//! Command-line behaviour: exit codes, artifacts and determinism.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hasimoto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hasimoto")).args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, sub: &str, config: Option<&str>, extra: &[&str]) -> Output {
    let out = dir.join("out");
    let mut args = vec![sub.to_string(), "--out".into(), out.display().to_string()];
    if let Some(text) = config {
        let path = dir.join("config.json");
        std::fs::write(&path, text).unwrap();
        args.push("--config".into());
        args.push(path.display().to_string());
    }
    args.extend(extra.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    hasimoto(&refs)
}

fn report(dir: &Path, sub: &str) -> Value {
    let text = std::fs::read_to_string(dir.join("out").join(format!("{sub}_report.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_passes_and_writes_a_complete_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "verify", None, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r = report(dir.path(), "verify");
    assert_eq!(r["command"], "verify");
    assert_eq!(r["passed"], true);
    assert_eq!(r["config_hash"].as_str().unwrap().len(), 64);
    assert!(r["versions"]["hasimoto-core"].is_string());
    assert_eq!(r["grid"]["M"], 129);
    assert!(r["checks"].as_array().unwrap().iter().any(|c| c["name"] == "G(4,2).identity.tsu3"));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn injected_perturbation_fails_with_the_named_identity() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "verify", Some(r#"{"perturbation": 1e-3, "random_profiles": 5, "contraction_triples": 50}"#), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL injected.tsu3"), "{}", stdout(&o));
    let r = report(dir.path(), "verify");
    assert_eq!(r["passed"], false);
    let tsu3 = r["details"]["injected"]["tsu3"].as_f64().unwrap();
    assert!((tsu3 - 1e-3).abs() < 1e-9);
}

#[test]
fn run_is_bit_identical_across_invocations() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run_in(d.path(), "run", None, &["--seed", "7"]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    for name in ["timeseries.csv", "run_report.json", "snapshots/snapshot_000.json", "snapshots/snapshot_004.json"] {
        let x = std::fs::read(a.path().join("out").join(name)).unwrap();
        let y = std::fs::read(b.path().join("out").join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
    let csv = std::fs::read_to_string(a.path().join("out/timeseries.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,energy,mass,constraint"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn report_keys_are_sorted() {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), "run", Some(r#"{"system": "q", "samples": 2}"#), &[]);
    let text = std::fs::read_to_string(dir.path().join("out/run_report.json")).unwrap();
    let top: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \"") && !l.starts_with("   "))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = top.clone();
    sorted.sort_unstable();
    assert_eq!(top, sorted);
}

#[test]
fn tolerance_scale_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "run", None, &["--tol-scale", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(dir.path(), "run");
    assert_eq!(r["tolerances"]["energy_drift"].as_f64(), Some(1e-2));
    assert_eq!(r["tolerances"]["min_ratio"].as_f64(), Some(3.0));
}

#[test]
fn configuration_problems_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let non_hamiltonian = r#"{"params": {"a": 1.0, "b": 1.0, "c": 1.0, "lambda": 0.0}}"#;
    let o = run_in(dir.path(), "equiv", Some(non_hamiltonian), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("c = 3(a - b)/2"));

    assert_eq!(run_in(dir.path(), "run", Some(r#"{"unknown_key": 1}"#), &[]).status.code(), Some(2));
    assert_eq!(run_in(dir.path(), "run", Some("not json"), &[]).status.code(), Some(2));
    assert_eq!(run_in(dir.path(), "convergence", Some(r#"{"levels": 2}"#), &[]).status.code(), Some(2));
    assert_eq!(run_in(dir.path(), "run", None, &["--tol-scale", "-1"]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(hasimoto(&["run", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "run", Some(r#"{"dt": {"cfl": 1e6}, "grid": {"L": 20.0, "M": 513}, "samples": 1}"#), &[]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("step rejected"));
}

#[test]
fn convergence_reports_second_order_for_the_transformed_system() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "convergence", Some(r#"{"system": "q", "horizon": 0.1}"#), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r = report(dir.path(), "convergence");
    let order = r["details"]["orders"][0].as_f64().unwrap();
    assert!((1.6..2.4).contains(&order), "order {order}");
}
