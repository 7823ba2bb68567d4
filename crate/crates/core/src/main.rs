use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use log::{error, info};

use subsim::config::{load_config, Command, Overrides, OUT_DIR_ENV};
use subsim::output::emit_results;
use subsim::runner::{execute, RunOutput};
use subsim::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_IO: u8 = 4;

/// Rare-event probability estimation by Subset Simulation.
#[derive(Debug, Parser)]
#[command(name = "subsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Master seed (default 0).
    #[arg(long, global = true, value_name = "U64", conflicts_with = "entropy_seed")]
    seed: Option<u64>,

    /// Draw the master seed from system entropy. The seed used is logged and
    /// recorded in the manifest.
    #[arg(long, global = true)]
    entropy_seed: bool,

    /// Output directory; overrides the config file and SUBSIM_OUT_DIR.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Independent replicates.
    #[arg(long, global = true, value_name = "R")]
    replicates: Option<usize>,

    /// CI profile: fewer replicates for sweeps and the self test.
    #[arg(long, global = true)]
    quick: bool,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Estimate one failure probability.
    Estimate,
    /// Compare Subset Simulation with direct Monte Carlo over a threshold grid.
    Sweep,
    /// Record the levels of a single run.
    Trace,
    /// Run the built-in invariant checks.
    Selftest,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse(_) | Error::Config { .. } | Error::Domain(_) => EXIT_VALIDATION,
        Error::BudgetExceeded { .. } | Error::Stalled { .. } => EXIT_BUDGET,
        Error::Io { .. } => EXIT_IO,
        Error::Invariant(_) => EXIT_FAILURE,
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    let command = match cli.command {
        Cmd::Estimate => Command::Estimate,
        Cmd::Sweep => Command::Sweep,
        Cmd::Trace => Command::Trace,
        Cmd::Selftest => Command::Selftest,
    };
    let seed = if cli.entropy_seed {
        let s = rand::random::<u64>();
        info!("entropy seed {s}");
        Some(s)
    } else {
        cli.seed
    };
    let overrides = Overrides {
        command: Some(command),
        seed,
        out_dir: cli.out.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from)),
        replicates: cli.replicates,
        quick: cli.quick,
    };
    let config = load_config(cli.config.as_deref(), &overrides)?;
    info!("running `{}` with seed {}", command.name(), config.seed);

    let start = Instant::now();
    let output = execute(&config)?;
    let wall = start.elapsed().as_secs_f64();
    let files = emit_results(&output, &config, wall, &config.out_dir)?;

    let ok = match &output {
        RunOutput::Estimate(e) => {
            if let Some(s) = e.ss.as_ref().and_then(|s| s.summary.p_hat) {
                println!("ss  p_hat mean {:.6e} (c.o.v. {:?}, {} runs)", s.mean, s.cov, s.count);
            }
            if let Some(s) = e.dmc.as_ref().and_then(|d| d.stats) {
                println!("dmc p_hat mean {:.6e} (c.o.v. {:?}, {} runs)", s.mean, s.cov, s.count);
            }
            println!("true p_F       {:.6e}", e.p_true);
            true
        }
        RunOutput::Trace(t) => {
            let est = &t.trace.estimate;
            println!("p_hat {:.6e} after {} levels", est.p_hat, est.levels);
            println!("n_F by level {:?}", est.failure_counts());
            true
        }
        RunOutput::Sweep(rows) => {
            println!("{} grid points", rows.len());
            true
        }
        RunOutput::Selftest(report) => {
            for c in &report.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("{tag} {}: {}", c.name, c.detail);
            }
            report.passed()
        }
    };
    for f in &files {
        println!("wrote {}", f.display());
    }
    Ok(ok)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILURE),
        Err(e) => {
            error!("{e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
