use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ancf14_bench::Summary;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn ancf14(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ancf14")).args(args).output().expect("binary runs")
}

fn run_config(config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    ancf14(&args)
}

fn summary(dir: &Path) -> Summary {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn passing_config_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(&configs().join("cantilever.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(dir.path());
    assert!(s.passed);
    assert_eq!(s.files, ["custom_static.csv"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS custom.constraints"));
}

#[test]
fn failing_checks_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(&configs().join("shaft_fast.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(dir.path());
    assert!(!s.passed);
    assert!(s.checks.iter().any(|c| c.id == "shaft.first_frequency" && c.passed));
    assert!(dir.path().join("shaft_midspan.csv").is_file());
}

#[test]
fn errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = run_config(&missing, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));

    assert_eq!(ancf14(&["run", "custom"]).status.code(), Some(1));
    assert_eq!(ancf14(&["run", "shaft", "--elements", "5"]).status.code(), Some(1));
    assert_eq!(ancf14(&["run", "spring", "--deformation", "medium"]).status.code(), Some(1));
    assert_eq!(ancf14(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(ancf14(&["--help"]).status.code(), Some(0));
}

#[test]
fn identical_runs_write_identical_files() {
    for config in ["pendulum.json", "cantilever.json"] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        for dir in [&a, &b] {
            assert_eq!(run_config(&configs().join(config), dir.path(), &[]).status.code(), Some(0));
        }
        for file in summary(a.path()).files {
            let left = std::fs::read(a.path().join(&file)).unwrap();
            let right = std::fs::read(b.path().join(&file)).unwrap();
            assert!(!left.is_empty());
            assert_eq!(left, right, "{config}: {file} differs");
        }
    }
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("buckling.json");
    std::fs::write(&config, r#"{"name": "buckling", "n_elements": 4, "overrides": {"end_time_s": 0.02}}"#).unwrap();
    let out = run_config(&config, dir.path(), &["--no-torsion", "--dt", "0.002"]);
    assert!(matches!(out.status.code(), Some(0 | 2)), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(dir.path());
    assert_eq!(s.files, ["buckling_no_torsion.csv"]);
    let ids: Vec<&str> = s.checks.iter().map(|c| c.id.as_str()).collect();
    assert_eq!(ids, ["buckling.no_torsion"]);
    let csv = std::fs::read_to_string(dir.path().join("buckling_no_torsion.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t_s,u_y_m,u_z_m,theta_rad"));
    assert_eq!(csv.lines().count(), 1 + 11);
}
