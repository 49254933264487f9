use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const DAMPING: &str = r#"{
  "seed": 1,
  "model": {"type": "gaussian", "d": 1,
            "omega": [[[0.0, 0.0]]], "kappa": [[[0.0, 0.0]]], "zeta": [[0.0, 0.0]],
            "V": [[[1.0, 0.0]]], "U": [[[0.0, 0.0]]]},
  "space": {"n_max": 5},
  "tasks": [TASKS]
}"#;

fn gqms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gqms")).args(args).output().expect("spawn gqms")
}

fn write_config(dir: &Path, tasks: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, DAMPING.replace("TASKS", tasks)).unwrap();
    path
}

#[test]
fn run_writes_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"task": "minimality"}, {"task": "evolve", "times": [0.5, 1.0]}"#);
    let out = dir.path().join("out");
    let res = gqms(&["run", "--config", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["tasks"].as_array().unwrap().len(), 2);
}

#[test]
fn failed_expectation_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"task": "kossakowski"}"#);
    let out = dir.path().join("out");
    let res = gqms(&["run", "--config", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(out.join("report.json").exists());
}

#[test]
fn validate_accepts_shipped_scenarios() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    for name in ["two_boson.json", "damping_contrast.json", "qubit.json"] {
        let res = gqms(&["validate", "--config", root.join(name).to_str().unwrap()]);
        assert_eq!(res.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&res.stderr));
    }
}

#[test]
fn empty_task_list_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    assert_eq!(gqms(&["validate", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn schema_errors_name_the_offending_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"task": "minimality"}, {"task": "lemma1", "samples": "many"}"#);
    let res = gqms(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("/tasks/1/samples"), "{stderr}");
}

#[test]
fn missing_file_exits_one() {
    let res = gqms(&["run", "--config", "/nonexistent/config.json"]);
    assert_eq!(res.status.code(), Some(1));
}
