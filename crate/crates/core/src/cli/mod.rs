//! Command-line experiment runner.
//!
//! ```text
//! floqsim run --config FILE --out DIR
//! floqsim sweep-omega --config FILE --grid lo:hi:steps --out DIR
//! floqsim stability --config FILE --deltas v1,v2,... --out DIR
//! floqsim preset NAME --out DIR
//! ```
//!
//! Exit codes: 0 success, 2 configuration error, 3 convergence failure, 1
//! anything else. `FLOQSIM_THREADS` caps the worker pool.

pub mod config;
pub mod experiments;
pub mod output;
pub mod presets;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use config::ExperimentConfig;
pub use experiments::{evolve, run, stability, sweep_omega, OmegaGrid, StabilityPoint};
pub use presets::{preset, PresetAction, PresetJob, PRESET_NAMES};

use crate::error::{FloqError, Result};

#[derive(Debug, Parser)]
#[command(name = "floqsim", version, about = "Integer and fractional resonances in driven lattices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve one configuration and write observable CSVs.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate the resonance weights over a drive-frequency grid in units of U.
    SweepOmega {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Entropy growth under detuned fractional drives.
    Stability {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        deltas: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a named experiment.
    Preset {
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

pub fn exit_code(e: &FloqError) -> u8 {
    if e.is_config() {
        2
    } else if e.is_convergence() {
        3
    } else {
        1
    }
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("FLOQSIM_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| FloqError::config("FLOQSIM_THREADS", format!("expected a positive integer, got `{v}`")))?;
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn run_preset(name: &str, out: &Path) -> Result<()> {
    for job in preset(name)? {
        let dir = if job.subdir.is_empty() { out.to_path_buf() } else { out.join(&job.subdir) };
        match &job.action {
            PresetAction::Run => {
                run(&job.config, &dir)?;
            }
            PresetAction::Stability(deltas) => {
                stability(&job.config, deltas, &dir)?;
            }
        }
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("config.toml"), job.config.to_toml())?;
    }
    Ok(())
}

pub fn execute(cli: Cli) -> Result<()> {
    init_threads()?;
    match cli.command {
        Command::Run { config, out } => {
            run(&ExperimentConfig::load(&config)?, &out)?;
        }
        Command::SweepOmega { config, grid, out } => {
            let grid = OmegaGrid::parse(&grid)?;
            sweep_omega(&ExperimentConfig::load(&config)?, &grid, &out)?;
        }
        Command::Stability { config, deltas, out } => {
            let deltas = experiments::parse_deltas(&deltas)?;
            stability(&ExperimentConfig::load(&config)?, &deltas, &out)?;
        }
        Command::Preset { name, out } => run_preset(&name, &out)?,
    }
    Ok(())
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("floqsim: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
