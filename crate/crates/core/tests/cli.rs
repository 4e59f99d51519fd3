use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

fn peakrl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_peakrl"))
        .args(args)
        .env_remove("PEAKRL_OUT")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    assert_eq!(code(&peakrl(&["validate", path_str(&data("running_example.json"))])), 0);
    let bad = peakrl(&["validate", path_str(&data("bad_kernel.json"))]);
    assert_eq!(code(&bad), 2);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("sums to 0.9"));
    let split = peakrl(&["validate", path_str(&data("disconnected.json"))]);
    assert_eq!(code(&split), 2);
    assert!(String::from_utf8_lossy(&split.stdout).contains("unichain"));
    assert_eq!(code(&peakrl(&["validate", path_str(&data("infeasible.json"))])), 3);
    assert_eq!(code(&peakrl(&["validate", "/nonexistent/instance.json"])), 4);
}

#[test]
fn solve_writes_the_transformed_solution() {
    let dir = tempfile::tempdir().unwrap();
    let out = peakrl(&["solve", path_str(&data("running_example.json")), "--out", path_str(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("solution.json")).unwrap()).unwrap();
    let q00 = json["q_star"][0][0].as_f64().unwrap();
    assert!((q00 - 2.0).abs() < 1e-6, "{json}");
    assert_eq!(json["policy"], serde_json::json!([0]));
    assert_eq!(json["feasibility"]["status"], "feasible");

    let infeasible = peakrl(&["solve", path_str(&data("infeasible.json")), "--out", path_str(dir.path())]);
    assert_eq!(code(&infeasible), 3);
}

#[test]
fn learn_is_reproducible_and_honors_precedence() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |out: &Path| {
        vec![
            "learn".to_string(),
            "--instance".into(),
            data("running_example.json").display().to_string(),
            "--steps".into(),
            "5000".into(),
            "--reps".into(),
            "2".into(),
            "--seed".into(),
            "3".into(),
            "--out".into(),
            out.display().to_string(),
        ]
    };
    for dir in [&a, &b] {
        let argv = args(dir.path());
        let out = peakrl(&argv.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["metrics_rep000.csv", "metrics_rep001.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(name)).unwrap());
    }
    assert_ne!(
        std::fs::read(a.path().join("metrics_rep000.csv")).unwrap(),
        std::fs::read(a.path().join("metrics_rep001.csv")).unwrap()
    );

    // Config file beats the flag.
    let cfg_dir = tempfile::tempdir().unwrap();
    let cfg = cfg_dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        serde_json::json!({"instance": data("running_example.json"), "steps": 100, "replications": 1}).to_string(),
    )
    .unwrap();
    let out = peakrl(&["learn", path_str(&cfg), "--steps", "999", "--out", path_str(a.path())]);
    assert_eq!(code(&out), 0);
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(a.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["steps"], 100);
}

#[test]
fn learn_rejects_zero_replications() {
    let dir = tempfile::tempdir().unwrap();
    let out = peakrl(&[
        "learn",
        "--instance",
        path_str(&data("running_example.json")),
        "--reps",
        "0",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_peakrl"))
        .args(["learn", "--instance", path_str(&data("running_example.json")), "--steps", "200"])
        .env("PEAKRL_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("summary.json").exists());
    assert!(dir.path().join("metrics_rep000.csv").exists());
}

#[test]
fn audit_battery_and_single_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = peakrl(&["audit", "--count", "5", "--seed", "1", "--out", path_str(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("audit.json").exists());
    let out = peakrl(&["audit", "--instance", path_str(&data("wireless.json")), "--out", path_str(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}
