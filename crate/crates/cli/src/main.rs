use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use quadgpe_cli::config::{self, Workflow};
use quadgpe_cli::workflows::{run_evolve, run_exact, run_sweep, run_verify, EXIT_ERROR};

/// Exact-solution toolkit for the 1D nonlocal Gross-Pitaevskii equation with
/// a quadratic interaction kernel.
#[derive(Parser)]
#[command(name = "quadgpe", version, about)]
struct Cli {
    /// Configuration file with dotted keys (see docs/config-schema.txt).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for data files and reports.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads for sweep points.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write closed-form family members as wavefunction/density CSVs.
    Exact,
    /// Integrate the full equation with the split-step engine.
    Evolve,
    /// Run the verification checklist; exit 0 only if every check passes.
    Verify,
    /// Evaluate the per-point metrics over a list of parameter values.
    Sweep,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workflow = match cli.command {
        Command::Exact => Workflow::Exact,
        Command::Evolve => Workflow::Evolve,
        Command::Verify => Workflow::Verify,
        Command::Sweep => Workflow::Sweep,
    };

    let mut cfg = match config::load(cli.config.as_deref()) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    if let Some(declared) = cfg.workflow {
        if declared != workflow {
            eprintln!(
                "error: config declares task.workflow = {}, but the {} subcommand was invoked",
                declared.name(),
                workflow.name()
            );
            return ExitCode::from(EXIT_ERROR as u8);
        }
    }
    if cli.workers > 1 {
        cfg.workers = cli.workers;
    }
    let out_dir = cfg.out_dir.clone().unwrap_or(cli.out);

    let outcome = match workflow {
        Workflow::Exact => run_exact(&cfg, &out_dir),
        Workflow::Evolve => run_evolve(&cfg, &out_dir),
        Workflow::Verify => run_verify(&cfg, &out_dir),
        Workflow::Sweep => run_sweep(&cfg, &out_dir),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
