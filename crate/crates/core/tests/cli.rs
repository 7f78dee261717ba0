use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kagft::cli::RunConfig;
use serde_json::Value;

fn kagft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kagft")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn small_config(dir: &Path) -> PathBuf {
    let path = dir.join("small.json");
    let cfg = r#"{
        "params": [{ "k": 0.5, "a": 2.0 }, { "k": 0.0, "a": 0.5 }],
        "n_basis": 16,
        "p_values": [1.5],
        "hyp_b": [2.0],
        "psi": ["matched"],
        "q_values": [3.0],
        "symbols": ["indicator:R=1"],
        "opnorm_samples": 4
    }"#;
    fs::write(&path, cfg).unwrap();
    path
}

#[test]
fn check_params_reports_and_rejects() {
    let ok = kagft(&["check-params", "--k", "0.5", "--a", "2"]);
    assert!(ok.status.success());
    let report = json(&ok);
    assert_eq!(report["admissible"], Value::Bool(true));
    assert_eq!(report["homogeneous_dim"].as_f64(), Some(2.0));

    let bad = kagft(&["check-params", "--k", "0", "--a", "0.5"]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("inadmissible"));
}

#[test]
fn sweep_is_deterministic_and_isolates_bad_cases() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let mut summaries = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let out = kagft(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        summaries.push((json(&out), out_dir));
    }
    let (summary, a) = &summaries[0];
    let (_, b) = &summaries[1];
    // the inadmissible case is recorded as one failed case; everything else passes
    assert_eq!(summary["case_total"].as_u64().unwrap(), summary["pass_total"].as_u64().unwrap() + 1);
    assert_eq!(summary["failures"].as_array().unwrap().len(), 1);
    let errors = summary["errors"].as_object().unwrap();
    assert_eq!(errors.len(), 1);
    assert!(errors.keys().next().unwrap().contains("a0.5"));

    let mut names: Vec<_> = fs::read_dir(a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(!names.is_empty());
    for name in names {
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?} differs");
    }
}

#[test]
fn shipped_config_parses() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.json");
    let cfg = RunConfig::load(&path).unwrap();
    assert_eq!(cfg.params.len(), 4);
}

#[test]
fn heat_reports_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let diag = dir.path().join("diag.json");
    let out = kagft(&[
        "heat", "--k", "0.5", "--a", "2", "--n", "16", "--n-time", "32",
        "--diagnostics", diag.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("t,norm"));
    assert_eq!(csv.lines().count(), 34);
    let d: Value = serde_json::from_str(&fs::read_to_string(diag).unwrap()).unwrap();
    assert_eq!(d["guaranteed"], Value::Bool(true));
    assert!(d["T_star"].as_f64().unwrap() > d["horizon"].as_f64().unwrap());
}
