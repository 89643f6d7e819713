use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn slice_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slice-lab")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn diameter_scenario_reports_point_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "d.json",
        r#"{"kind": "diameter", "payload": {"combo": [{"lambda": 1, "epsilon": 0.1,
            "functional": {"space": {"kind": "finite-discrete", "n": 2, "field": "real"},
                           "coords": {"0": 0.5, "1": 0.5}}}]}}"#,
    );
    let out = slice_lab(&["run", &path]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["value"].as_f64(), Some(0.2));
    assert_eq!(r["tool"], "slice-lab");
    assert_eq!(r["passed"], true);
}

#[test]
fn malformed_json_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "bad.json", "{\n \"kind\": \"lemma\",\n \"payload\": {\"mu\": }\n}");
    let out = slice_lab(&["run", &path]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_file_exits_two() {
    let out = slice_lab(&["run", "/nonexistent/scenario.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generate_is_deterministic_and_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = slice_lab(&["--seed", "42", "generate", "--force-case-three", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let out = slice_lab(&["run", a.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = report(&out);
    assert_eq!(r["kind"], "decompose");
    assert_eq!(r["seed"], 42);
}

#[test]
fn empty_campaign_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "c.json", r#"{"instances": 0}"#);
    let out = slice_lab(&["--seed", "3", "campaign", "--config", &path]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"]["instances"], 0);
}

#[test]
fn tampered_campaign_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "c.json",
        r#"{"instances": 4, "samples_per_instance": 2, "models": ["c0"], "tamper": true}"#,
    );
    let out = slice_lab(&["--seed", "5", "campaign", "--config", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["passed"], false);
}

#[test]
fn lemma_instance_and_sweep() {
    let out = slice_lab(&["lemma", "--alpha", "0", "--beta", "3.14159", "--mu", "0.25"]);
    assert_eq!(out.status.code(), Some(0));
    let out = slice_lab(&["--seed", "9", "lemma", "--samples", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn invalid_lemma_weight_exits_two() {
    let out = slice_lab(&["lemma", "--alpha", "0", "--beta", "1", "--mu", "0.7"]);
    assert_eq!(out.status.code(), Some(2));
}
