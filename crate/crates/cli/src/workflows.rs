//! The four pipelines behind the subcommands. Data files are byte-identical
//! across runs of the same configuration; only the manifest carries a
//! timestamp.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};



use quadgpe::closedform::psi_nu_phase_rate;
use quadgpe::evolve::{compare_moments, split_step_evolve, EvolutionConfig};
use quadgpe::grid::Grid;
use quadgpe::io::{format_g17, write_density_csv, write_trajectory_csv, write_wavefunction_csv};
use quadgpe::model::{derive_effective, derive_effective_frozen, EffectiveParams};
use quadgpe::moments::{fit_constants, integrate_hes_numeric, moments_from_wavefunction};
use quadgpe::suite::{point_metrics, run_all, PointMetrics, SuiteConfig};
use quadgpe::symmetry::{displaced_solution, displacement_params};
use quadgpe::QuadraticModel;

use crate::config::{apply_model_key, RunConfig};

/// Exit code conventions: 0 success, 1 failed checks, 2 setup/config errors.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

pub type WorkflowResult = anyhow::Result<i32>;

fn effective_for(cfg: &RunConfig) -> quadgpe::Result<EffectiveParams> {
    match cfg.kappa_tilde_override {
        Some(kt) => derive_effective_frozen(&cfg.model, kt),
        None => derive_effective(&cfg.model, 1.0),
    }
}

/// Builds the simulation grid: explicit overrides win, otherwise the grid is
/// sized from the model for the largest requested state and orbit.
fn build_grid(cfg: &RunConfig, eff: &EffectiveParams) -> quadgpe::Result<Grid> {
    let max_nu = cfg.nu_list.iter().copied().max().unwrap_or(0);
    let orbit = cfg
        .alpha_list
        .iter()
        .map(|&alpha| {
            let (_, c) = displacement_params(alpha, max_nu, eff, &cfg.model);
            (c.c1 * c.c1 + c.c2 * c.c2).sqrt()
        })
        .fold(0.0f64, f64::max);
    match (cfg.grid_half_width, cfg.grid_points) {
        (Some(hw), Some(n)) => Grid::symmetric(hw, n),
        (Some(hw), None) => {
            let auto = Grid::for_model(&cfg.model, eff, max_nu, orbit)?;
            let n = ((2.0 * hw / auto.step()).ceil() as usize).next_power_of_two().max(64);
            Grid::symmetric(hw, n)
        }
        (None, Some(n)) => {
            let auto = Grid::for_model(&cfg.model, eff, max_nu, orbit)?;
            Grid::symmetric(-auto.min(), n)
        }
        (None, None) => Grid::for_model(&cfg.model, eff, max_nu, orbit),
    }
}

fn snapshot_times(cfg: &RunConfig) -> Vec<f64> {
    let mut times = vec![0.0];
    let stride = cfg.dt * cfg.record_every as f64;
    let mut k = 1usize;
    while stride > 0.0 && stride * k as f64 <= cfg.t_final + 1e-12 {
        times.push(stride * k as f64);
        k += 1;
    }
    times
}

struct Manifest {
    lines: Vec<String>,
}

impl Manifest {
    fn new(workflow: &str, cfg: &RunConfig) -> Self {
        let stamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut lines = vec![
            format!("workflow = {workflow}"),
            format!("generated_unix = {stamp}"),
            format!("model.mu = {}", format_g17(cfg.model.mu)),
            format!("model.rho = {}", format_g17(cfg.model.rho)),
            format!("model.sigma = {}", format_g17(cfg.model.sigma)),
            format!("model.a = {}", format_g17(cfg.model.a)),
            format!("model.b = {}", format_g17(cfg.model.b)),
            format!("model.c = {}", format_g17(cfg.model.c)),
            format!("model.kappa = {}", format_g17(cfg.model.kappa)),
            format!("model.hbar = {}", format_g17(cfg.model.hbar)),
        ];
        if let Some(kt) = cfg.kappa_tilde_override {
            lines.push(format!("model.kappa_tilde_override = {}", format_g17(kt)));
        }
        Self { lines }
    }

    fn record(&mut self, line: String) {
        self.lines.push(line);
    }

    fn write(&self, dir: &Path) -> anyhow::Result<()> {
        let mut f = BufWriter::new(File::create(dir.join("manifest.txt"))?);
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

fn ensure_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// `exact`: evaluates the requested family members on the snapshot schedule
/// and writes wavefunction + density CSVs plus a manifest.
pub fn run_exact(cfg: &RunConfig, out_dir: &Path) -> WorkflowResult {
    ensure_dir(out_dir)?;
    let eff = effective_for(cfg)?;
    let grid = build_grid(cfg, &eff)?;
    let times = snapshot_times(cfg);
    let mut manifest = Manifest::new("exact", cfg);
    manifest.record(format!("grid.points = {}", grid.len()));
    manifest.record(format!("grid.half_width = {}", format_g17(-grid.min())));

    for &nu in &cfg.nu_list {
        manifest.record(format!(
            "phase_rate nu={nu} = {}",
            format_g17(psi_nu_phase_rate(nu, &eff, &cfg.model))
        ));
        for (ai, &alpha) in cfg.alpha_list.iter().enumerate() {
            for (si, &t) in times.iter().enumerate() {
                let psi = displaced_solution(nu, alpha, t, &eff, &cfg.model, grid)?;
                let wf_name = format!("psi_nu{nu}_a{ai}_s{si}.csv");
                let den_name = format!("density_nu{nu}_a{ai}_s{si}.csv");
                let mut wf = BufWriter::new(File::create(out_dir.join(&wf_name))?);
                write_wavefunction_csv(&mut wf, &psi)?;
                let mut den = BufWriter::new(File::create(out_dir.join(&den_name))?);
                write_density_csv(&mut den, &psi)?;
                manifest.record(format!(
                    "file {wf_name} nu={nu} alpha_re={} alpha_im={} t={}",
                    format_g17(alpha.re),
                    format_g17(alpha.im),
                    format_g17(t)
                ));
                manifest.record(format!(
                    "file {den_name} nu={nu} alpha_re={} alpha_im={} t={}",
                    format_g17(alpha.re),
                    format_g17(alpha.im),
                    format_g17(t)
                ));
            }
        }
    }
    manifest.write(out_dir)?;
    Ok(EXIT_OK)
}

/// `evolve`: integrates the first requested family member with the
/// split-step engine, writes snapshot CSVs, the evolved moment trajectory,
/// and a flat key-value report.
pub fn run_evolve(cfg: &RunConfig, out_dir: &Path) -> WorkflowResult {
    ensure_dir(out_dir)?;
    let eff = effective_for(cfg)?;
    let grid = build_grid(cfg, &eff)?;
    let nu = cfg.nu_list[0];
    let alpha = cfg.alpha_list[0];
    let psi0 = displaced_solution(nu, alpha, 0.0, &eff, &cfg.model, grid)?;
    let evo = EvolutionConfig { dt: cfg.dt, t_final: cfg.t_final, record_every: cfg.record_every };
    let out = split_step_evolve(&psi0, &evo, &cfg.model)?;

    let mut manifest = Manifest::new("evolve", cfg);
    manifest.record(format!("grid.points = {}", grid.len()));
    for (si, (t, psi)) in out.snapshots.iter().enumerate() {
        let name = format!("evolved_s{si}.csv");
        let mut f = BufWriter::new(File::create(out_dir.join(&name))?);
        write_wavefunction_csv(&mut f, psi)?;
        manifest.record(format!("file {name} t={}", format_g17(*t)));
    }

    // moment trajectory of the evolved states, against the fitted orbit
    let (m0, _) = moments_from_wavefunction(&psi0, &cfg.model)?;
    let c = fit_constants(&m0, &out.eff_used, &cfg.model)?;
    let trajectory: Vec<_> = {
        let mut rows = Vec::new();
        for (t, psi) in &out.snapshots {
            let (st, _) = moments_from_wavefunction(psi, &cfg.model)?;
            rows.push((*t, st));
        }
        rows
    };
    let mut tf = BufWriter::new(File::create(out_dir.join("moments.csv"))?);
    write_trajectory_csv(&mut tf, &trajectory)?;

    // the independently integrated moment system at the same times, for
    // side-by-side comparison with moments.csv
    let times: Vec<f64> = out.snapshots.iter().map(|(t, _)| *t).collect();
    export_hes_trajectory(
        &cfg.model,
        &out.eff_used,
        &m0,
        &times,
        quadgpe::moments::default_hes_step(&out.eff_used),
        &out_dir.join("hes_numeric.csv"),
    )?;

    let errs = compare_moments(&out.snapshots, &c, &out.eff_used, &cfg.model)?;
    let mut report = BufWriter::new(File::create(out_dir.join("report.txt"))?);
    writeln!(report, "steps = {}", out.steps)?;
    writeln!(report, "norm_drift = {}", format_g17(out.max_norm_drift))?;
    writeln!(report, "moment_error_p = {}", format_g17(errs.p))?;
    writeln!(report, "moment_error_x = {}", format_g17(errs.x))?;
    writeln!(report, "moment_error_d11 = {}", format_g17(errs.d11))?;
    writeln!(report, "moment_error_d12 = {}", format_g17(errs.d12))?;
    writeln!(report, "moment_error_d22 = {}", format_g17(errs.d22))?;
    writeln!(report, "kappa_tilde_used = {}", format_g17(out.eff_used.kappa_tilde))?;
    manifest.write(out_dir)?;
    Ok(EXIT_OK)
}

fn metrics_block(m: &PointMetrics) -> Vec<String> {
    vec![
        format!("omega = {}", format_g17(m.omega)),
        format!("omega_bar = {}", format_g17(m.omega_bar)),
        format!("kappa_tilde = {}", format_g17(m.kappa_tilde)),
        format!("phase_rate = {}", format_g17(m.phase_rate)),
        format!("residual_exact = {}", format_g17(m.residual_exact)),
        format!("residual_displaced = {}", format_g17(m.residual_displaced)),
        format!("moment_error = {}", format_g17(m.moment_error)),
    ]
}

/// `verify`: runs the full acceptance checklist; writes a report and returns
/// a nonzero exit code when any check fails.
pub fn run_verify(cfg: &RunConfig, out_dir: &Path) -> WorkflowResult {
    ensure_dir(out_dir)?;
    let suite_cfg = SuiteConfig {
        model: cfg.model,
        kappa_tilde_override: cfg.kappa_tilde_override,
        ..SuiteConfig::default()
    };
    let results = run_all(&suite_cfg)?;
    let metrics = point_metrics(
        &cfg.model,
        cfg.kappa_tilde_override,
        cfg.nu_list[0],
        cfg.alpha_list[0],
    )?;

    let mut report = BufWriter::new(File::create(out_dir.join("report.txt"))?);
    let mut all_ok = true;
    for r in &results {
        println!("{}", r.line());
        writeln!(report, "{}", r.line())?;
        all_ok &= r.passed;
    }
    writeln!(
        report,
        "point-metrics nu={} alpha_re={} alpha_im={}",
        cfg.nu_list[0],
        format_g17(cfg.alpha_list[0].re),
        format_g17(cfg.alpha_list[0].im)
    )?;
    for line in metrics_block(&metrics) {
        println!("{line}");
        writeln!(report, "{line}")?;
    }
    // moment-consistency of the point itself is part of the verdict: a
    // mismatched frozen interaction strength must fail here even when the
    // self-consistent checks cannot see it
    let point_ok = metrics.moment_error <= 1e-5
        && metrics.residual_exact <= 1e-6
        && metrics.residual_displaced <= 1e-6;
    writeln!(report, "point_ok = {point_ok}")?;
    all_ok &= point_ok;
    writeln!(report, "verdict = {}", if all_ok { "pass" } else { "fail" })?;
    println!("verdict = {}", if all_ok { "pass" } else { "fail" });
    Ok(if all_ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

/// One sweep row: the point either produced metrics or an error code.
struct SweepRow {
    index: usize,
    value: f64,
    outcome: Result<PointMetrics, String>,
}

/// `sweep`: evaluates [`point_metrics`] over a list of values for one model
/// key, running points concurrently but emitting rows in input order.
/// Per-point failures become rows with an error code; the sweep continues.
pub fn run_sweep(cfg: &RunConfig, out_dir: &Path) -> WorkflowResult {
    ensure_dir(out_dir)?;
    let key = cfg
        .sweep_key
        .clone()
        .ok_or_else(|| anyhow::anyhow!("sweep requires sweep.key"))?;
    if cfg.sweep_values.is_empty() {
        anyhow::bail!("sweep requires a non-empty sweep.values list");
    }
    let nu = cfg.nu_list[0];
    let alpha = cfg.alpha_list[0];

    let evaluate = |index: usize, value: f64| -> SweepRow {
        let mut model = cfg.model;
        let outcome = match apply_model_key(&mut model, &key, value) {
            Err(e) => Err(e),
            Ok(()) => point_metrics(&model, cfg.kappa_tilde_override, nu, alpha)
                .map_err(|e| e.to_string()),
        };
        SweepRow { index, value, outcome }
    };

    let mut rows: Vec<Option<SweepRow>> = Vec::new();
    rows.resize_with(cfg.sweep_values.len(), || None);
    let workers = cfg.workers.max(1).min(cfg.sweep_values.len());
    if workers <= 1 {
        for (i, &v) in cfg.sweep_values.iter().enumerate() {
            rows[i] = Some(evaluate(i, v));
        }
    } else {
        let next = std::sync::atomic::AtomicUsize::new(0);
        let values = &cfg.sweep_values;
        let results = std::sync::Mutex::new(&mut rows);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if i >= values.len() {
                        break;
                    }
                    let row = evaluate(i, values[i]);
                    results.lock().unwrap()[i] = Some(row);
                });
            }
        });
    }

    let mut f = BufWriter::new(File::create(out_dir.join("sweep.csv"))?);
    writeln!(
        f,
        "index,key,value,status,omega,omega_bar,kappa_tilde,phase_rate,residual_exact,residual_displaced,moment_error"
    )?;
    for row in rows.into_iter().flatten() {
        match row.outcome {
            Ok(m) => writeln!(
                f,
                "{},{},{},ok,{},{},{},{},{},{},{}",
                row.index,
                key,
                format_g17(row.value),
                format_g17(m.omega),
                format_g17(m.omega_bar),
                format_g17(m.kappa_tilde),
                format_g17(m.phase_rate),
                format_g17(m.residual_exact),
                format_g17(m.residual_displaced),
                format_g17(m.moment_error)
            )?,
            Err(code) => writeln!(
                f,
                "{},{},{},error:{},,,,,,,",
                row.index,
                key,
                format_g17(row.value),
                code.replace(',', ";")
            )?,
        }
    }
    let mut manifest = Manifest::new("sweep", cfg);
    manifest.record(format!("sweep.key = {key}"));
    manifest.record(format!("sweep.points = {}", cfg.sweep_values.len()));
    manifest.write(out_dir)?;
    Ok(EXIT_OK)
}

/// Shared moment-trajectory export used by tests and the evolve pipeline:
/// integrates the moment system numerically and writes the CSV rows.
pub fn export_hes_trajectory(
    model: &QuadraticModel,
    eff: &EffectiveParams,
    initial: &quadgpe::MomentState,
    times: &[f64],
    step: f64,
    path: &Path,
) -> anyhow::Result<()> {
    let traj = integrate_hes_numeric(initial, times, step, eff, model)?;
    let mut f = BufWriter::new(File::create(path)?);
    write_trajectory_csv(&mut f, &traj)?;
    Ok(())
}
