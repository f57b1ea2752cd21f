//! Pipeline-level tests run through the library API (the binary wiring has
//! its own smoke tests): file contracts, determinism, verification verdicts
//! and sweep behavior.

use std::fs;
use std::path::Path;

use quadgpe_cli::config::{load, parse_alpha, RunConfig};
use quadgpe_cli::workflows::{
    run_evolve, run_exact, run_sweep, run_verify, EXIT_CHECK_FAILED, EXIT_OK,
};

fn base_config() -> RunConfig {
    RunConfig::default()
}

fn list_files(dir: &Path, prefix: &str) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with(prefix))
        .collect();
    names.sort();
    names
}

#[test]
fn exact_writes_one_file_set_per_member() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base_config();
    cfg.nu_list = vec![0, 1, 2];
    cfg.alpha_list = vec![parse_alpha("0+0i").unwrap()];
    cfg.t_final = 0.0; // one snapshot per member
    let code = run_exact(&cfg, dir.path()).unwrap();
    assert_eq!(code, EXIT_OK);
    assert_eq!(list_files(dir.path(), "psi_").len(), 3);
    assert_eq!(list_files(dir.path(), "density_").len(), 3);
    assert!(dir.path().join("manifest.txt").is_file());
}

#[test]
fn exact_density_maxima_follow_the_orbit() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base_config();
    cfg.nu_list = vec![0];
    cfg.alpha_list = vec![parse_alpha("0.5+0.5i").unwrap()];
    cfg.dt = 2e-3;
    cfg.record_every = 250;
    cfg.t_final = 2.0;
    run_exact(&cfg, dir.path()).unwrap();

    let eff = quadgpe::derive_effective(&cfg.model, 1.0).unwrap();
    let (_, c) =
        quadgpe::symmetry::displacement_params(cfg.alpha_list[0], 0, &eff, &cfg.model);

    let manifest = fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    let mut checked = 0;
    for line in manifest.lines() {
        let Some(rest) = line.strip_prefix("file density_") else { continue };
        let name = format!("density_{}", rest.split_whitespace().next().unwrap());
        let t: f64 = rest
            .split("t=")
            .nth(1)
            .unwrap()
            .parse()
            .unwrap();
        let body = fs::read_to_string(dir.path().join(&name)).unwrap();
        let mut best = (0.0f64, 0.0f64);
        for row in body.lines().skip(1) {
            let mut cols = row.split(',');
            let x: f64 = cols.next().unwrap().parse().unwrap();
            let d: f64 = cols.next().unwrap().parse().unwrap();
            if d > best.1 {
                best = (x, d);
            }
        }
        let want = quadgpe::moments::hes_analytic_1d(t, &c, &eff, &cfg.model).x;
        // the discrete argmax sits within one grid step of the orbit
        assert!(
            (best.0 - want).abs() <= 0.08,
            "t={t}: density max at {} vs orbit {want}",
            best.0
        );
        checked += 1;
    }
    assert!(checked >= 4, "expected several snapshots, saw {checked}");
}

#[test]
fn exact_reruns_are_byte_identical() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let mut cfg = base_config();
    cfg.nu_list = vec![0, 1];
    cfg.alpha_list = vec![parse_alpha("0.3-0.2i").unwrap()];
    cfg.dt = 1e-3;
    cfg.record_every = 400;
    cfg.t_final = 0.8;
    run_exact(&cfg, dir_a.path()).unwrap();
    run_exact(&cfg, dir_b.path()).unwrap();
    let names = list_files(dir_a.path(), "");
    assert_eq!(names, list_files(dir_b.path(), ""));
    for name in names {
        if name == "manifest.txt" {
            continue; // carries the timestamp
        }
        let a = fs::read(dir_a.path().join(&name)).unwrap();
        let b = fs::read(dir_b.path().join(&name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn evolve_writes_report_and_conserves_norm() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base_config();
    cfg.nu_list = vec![0];
    cfg.alpha_list = vec![parse_alpha("0.4+0.2i").unwrap()];
    cfg.dt = 2e-4;
    cfg.t_final = 0.5;
    cfg.record_every = 500;
    let code = run_evolve(&cfg, dir.path()).unwrap();
    assert_eq!(code, EXIT_OK);
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    let drift: f64 = report
        .lines()
        .find_map(|l| l.strip_prefix("norm_drift = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(drift <= 1e-10, "norm drift {drift}");
    let moment_x: f64 = report
        .lines()
        .find_map(|l| l.strip_prefix("moment_error_x = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(moment_x <= 1e-5);
    assert!(dir.path().join("moments.csv").is_file());
    assert!(!list_files(dir.path(), "evolved_").is_empty());
}

#[test]
fn verify_passes_on_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = base_config();
    let code = run_verify(&cfg, dir.path()).unwrap();
    assert_eq!(code, EXIT_OK);
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("verdict = pass"));
    assert_eq!(report.matches("PASS").count(), 12, "{report}");
}

#[test]
fn verify_fails_on_mismatched_frozen_interaction() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base_config();
    cfg.kappa_tilde_override = Some(0.9); // true kappa ||psi||^2 is 0.5
    let code = run_verify(&cfg, dir.path()).unwrap();
    assert_eq!(code, EXIT_CHECK_FAILED);
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("verdict = fail"));
}

#[test]
fn verify_rejects_non_oscillatory_regime_before_computing() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base_config();
    cfg.model.rho = 2.0; // sigma0 mu - rho^2 < 0
    let err = run_verify(&cfg, dir.path()).unwrap_err();
    assert!(err.to_string().contains("non-oscillatory"), "{err}");
}

#[test]
fn sweep_phase_rate_grows_with_coupling_and_matches_verify() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base_config();
    cfg.sweep_key = Some("model.kappa".into());
    cfg.sweep_values = vec![0.0, 0.1, 0.2];
    cfg.workers = 2;
    let code = run_sweep(&cfg, dir.path()).unwrap();
    assert_eq!(code, EXIT_OK);
    let body = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let rows: Vec<&str> = body.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    let rates: Vec<f64> = rows
        .iter()
        .map(|r| r.split(',').nth(7).unwrap().parse().unwrap())
        .collect();
    assert!(rates[0] < rates[1] && rates[1] < rates[2], "{rates:?}");

    // a one-point sweep and a verify report show identical numbers
    let dir_single = tempfile::tempdir().unwrap();
    let mut single = base_config();
    single.sweep_key = Some("model.kappa".into());
    single.sweep_values = vec![single.model.kappa];
    run_sweep(&single, dir_single.path()).unwrap();
    let sweep_row = fs::read_to_string(dir_single.path().join("sweep.csv")).unwrap();
    let row = sweep_row.lines().nth(1).unwrap().to_string();
    let cols: Vec<&str> = row.split(',').collect();

    let dir_verify = tempfile::tempdir().unwrap();
    run_verify(&base_config(), dir_verify.path()).unwrap();
    let report = fs::read_to_string(dir_verify.path().join("report.txt")).unwrap();
    let field = |name: &str| -> String {
        report
            .lines()
            .find_map(|l| l.strip_prefix(&format!("{name} = ")))
            .unwrap()
            .to_string()
    };
    assert_eq!(cols[4], field("omega"));
    assert_eq!(cols[5], field("omega_bar"));
    assert_eq!(cols[6], field("kappa_tilde"));
    assert_eq!(cols[7], field("phase_rate"));
    assert_eq!(cols[8], field("residual_exact"));
    assert_eq!(cols[9], field("residual_displaced"));
    assert_eq!(cols[10], field("moment_error"));
}

#[test]
fn sweep_crossing_the_regime_boundary_flags_rows_and_continues() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base_config();
    cfg.sweep_key = Some("model.rho".into());
    cfg.sweep_values = vec![0.2, 2.0, 0.1];
    let code = run_sweep(&cfg, dir.path()).unwrap();
    assert_eq!(code, EXIT_OK);
    let body = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let rows: Vec<&str> = body.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].contains(",ok,"));
    assert!(rows[1].contains("error:"), "{}", rows[1]);
    assert!(rows[1].contains("non-oscillatory"), "{}", rows[1]);
    assert!(rows[2].contains(",ok,"));
}

#[test]
fn config_file_round_trip_through_workflow() {
    // end-to-end: text config -> parsed -> exact run
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    fs::write(
        &cfg_path,
        "task.workflow = exact\ntask.nu = 0\ntask.alpha = 0+0i\n\
         evolution.t_final = 0\nmodel.kappa = 0.25\n",
    )
    .unwrap();
    let cfg = load(Some(&cfg_path)).unwrap();
    assert_eq!(cfg.model.kappa, 0.25);
    let out = dir.path().join("out");
    run_exact(&cfg, &out).unwrap();
    assert_eq!(list_files(&out, "psi_").len(), 1);
}
