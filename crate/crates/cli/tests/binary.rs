//! Smoke tests of the installed binary: argument wiring, config errors with
//! line-precise messages, and exit codes. The heavy numerical paths are
//! covered by the library-level pipeline tests.

use std::fs;
use std::process::Command;

fn quadgpe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quadgpe"))
}

#[test]
fn exact_subcommand_produces_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "task.nu = 0,1\ntask.alpha = 0+0i\nevolution.t_final = 0\n").unwrap();
    let out = dir.path().join("out");
    let status = quadgpe()
        .args(["exact", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("manifest.txt").is_file());
    assert!(out.join("psi_nu0_a0_s0.csv").is_file());
    assert!(out.join("psi_nu1_a0_s0.csv").is_file());
}

#[test]
fn config_errors_name_the_offending_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "model.mu = 1.0\nmodel.bogus = 3\n").unwrap();
    let output = quadgpe()
        .args(["exact", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("bad.cfg:2"), "{stderr}");
    assert!(stderr.contains("model.bogus"), "{stderr}");
}

#[test]
fn declared_workflow_must_match_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "task.workflow = sweep\n").unwrap();
    let output = quadgpe()
        .args(["exact", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("task.workflow"), "{stderr}");
}

#[test]
fn non_oscillatory_model_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    // sigma mu - rho^2 < 0 for every branch
    fs::write(&cfg, "model.rho = 3.0\ntask.nu = 0\nevolution.t_final = 0\n").unwrap();
    let output = quadgpe()
        .args(["exact", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("non-oscillatory"), "{stderr}");
}

#[test]
fn empty_nu_list_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "task.nu =\n").unwrap();
    let output = quadgpe()
        .args(["exact", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}
