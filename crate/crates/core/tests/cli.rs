use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_collective-dfs"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const SMALL: &str = r#"{
  "bath": {"R": 0.1},
  "couplings": {"r12": [0.11, 0.11]},
  "initial": {"p": 0.0, "theta": 0.0, "phi": 0.0},
  "time": {"t_max": 50.0, "steps": 101, "units": "inv_r"},
  "mode": {"sweep": {"resolution": 21}}
}"#;

#[test]
fn simulate_preset_csv() {
    let out = run(&["simulate", "--preset", "fig1b_solid"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("t,Phi,Q,"));
    assert!(header.contains("Ncr_star"));
    assert_eq!(text.lines().count(), 2002);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = run(&["simulate", "--preset", "fig1d_dashed", "--format", "json"]);
    let b = run(&["simulate", "--preset", "fig1d_dashed", "--format", "json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["command"], "simulate");
    assert_eq!(v["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(v["derived"]["cp_divisible"], false);
}

#[test]
fn sweep_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.json", SMALL);
    let one = dir.path().join("one.csv");
    let four = dir.path().join("four.csv");
    for (threads, path) in [("1", &one), ("4", &four)] {
        let out = run(&["sweep", "--config", &cfg, "--threads", threads, "--out", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
        // Coarse grid is flagged.
        assert!(String::from_utf8_lossy(&out.stderr).contains("warning:"));
    }
    let a = std::fs::read(&one).unwrap();
    assert_eq!(a, std::fs::read(&four).unwrap());
    assert!(String::from_utf8(a).unwrap().starts_with("r1,r2,r3,Q_inf,Ncr_star_inf\n"));
}

#[test]
fn tstar_summary_on_stderr() {
    let out = run(&["tstar", "--preset", "fig1b_solid"]);
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    let line = err.lines().find(|l| l.starts_with("t_star=")).expect("t_star reported");
    let t: f64 = line["t_star=".len()..].parse().unwrap();
    assert!((t - 181.2766).abs() < 1e-3, "{t}");
}

#[test]
fn unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", r#"{"bath": {"R": 0.1}, "colour": "red"}"#);
    let out = run(&["simulate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["simulate"]).status.code(), Some(1));
    assert_eq!(run(&["simulate", "--preset", "nope"]).status.code(), Some(1));
    assert_eq!(run(&["simulate", "--config", "/nonexistent/x.json"]).status.code(), Some(1));
    assert_eq!(run(&["sweep", "--preset", "fig1a_solid", "--threads", "0"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn unnormalized_state_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "heavy.json",
        r#"{"bath": {"R": 0.1}, "couplings": [1, 1, 1], "initial": {"amplitudes": [[1, 0], [1, 0], [0, 0]]}}"#,
    );
    let out = run(&["simulate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn every_subcommand_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.json", SMALL);
    for cmd in ["simulate", "sweep", "tstar", "markov", "oracle-check", "nqubit"] {
        let out = run(&[cmd, "--config", &cfg, "--format", "json"]);
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["command"], cmd);
        assert!(!v["rows"].as_array().unwrap().is_empty(), "{cmd}");
    }
}
