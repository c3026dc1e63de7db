//! Command-line front end for the lab harness.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on a
//! configuration or usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use seglab::lab::{self, LabRun, Scenario};
use seglab::Error;

#[derive(Parser)]
#[command(name = "seglab", version, about = "Competition-diffusion segregation lab")]
struct Cli {
    /// Output directory [default: $SEGLAB_OUT_DIR, else ./seglab-out]
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Overrides the scenario's seed for randomized probes
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads [default: all cores]
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time evolution for every k of the scenario
    Evolve { scenario: PathBuf },
    /// Limit solutions, scalar monotone problem and local uniqueness probe
    Stationary { scenario: PathBuf },
    /// Non-degeneracy under random boundary perturbations
    Genericity { scenario: PathBuf },
    /// Eigenvalue nearest zero at every limit solution
    Spectrum { scenario: PathBuf },
    /// Enumerate solutions of the limit problem with w(0) = a, w(1) = b
    Shoot {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        /// Kinetics, grid and scan settings [default: bundled scenario]
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
}

fn load(path: &PathBuf, seed: Option<u64>) -> seglab::Result<Scenario> {
    let mut sc = Scenario::load(path)?;
    if let Some(s) = seed {
        sc.seed = s;
    }
    Ok(sc)
}

fn execute(cli: Cli) -> seglab::Result<Box<dyn LabRun + Send>> {
    let seed = cli.seed;
    lab::with_jobs(cli.jobs, move || -> seglab::Result<Box<dyn LabRun + Send>> {
        Ok(match &cli.command {
            Command::Evolve { scenario } => Box::new(lab::run_evolve(&load(scenario, seed)?)?),
            Command::Stationary { scenario } => Box::new(lab::run_stationary(&load(scenario, seed)?)?),
            Command::Genericity { scenario } => Box::new(lab::run_genericity(&load(scenario, seed)?)?),
            Command::Spectrum { scenario } => Box::new(lab::run_spectrum(&load(scenario, seed)?)?),
            Command::Shoot { a, b, scenario } => {
                let sc = match scenario {
                    Some(p) => load(p, seed)?,
                    None => Scenario::builtin_default(),
                };
                Box::new(lab::run_shoot(&sc, *a, *b)?)
            }
        })
    })?
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_dir = lab::resolve_out_dir(cli.out_dir.clone());
    let run = match execute(cli) {
        Ok(run) => run,
        Err(e @ (Error::Config(_) | Error::InvalidInput(_) | Error::InvalidKinetics(_))) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("run failed: {e}");
            return ExitCode::from(1);
        }
    };
    let files = match run.write(&out_dir) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("cannot write outputs to {}: {e}", out_dir.display());
            return ExitCode::from(2);
        }
    };
    let report = run.report();
    for check in &report.checks {
        println!("{check}");
    }
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    eprintln!(
        "{} {} (seglab {}) in {:.2?}",
        report.command, report.scenario, report.version, report.wall_clock
    );
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
