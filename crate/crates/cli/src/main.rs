//! `esdg`: run or sweep solver configurations and write CSV artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use esdg_core::{Error, Grid, RunConfig};

#[derive(Parser)]
#[command(name = "esdg", version, about = "Entropy stable DG solver for the 1D Euler equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: `out`).
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a base configuration over a parameter grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::InvalidArgument(_) | Error::Unsupported(_) => 2,
        Error::IntegrationFailure { .. } => 3,
        Error::Inadmissible { .. } => 4,
        Error::Io(_) => 1,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn run(config: &Path, out: &Path) -> Result<u8, Error> {
    let cfg = RunConfig::parse(&read(config)?)?;
    let summary = esdg_core::run(&cfg, out)?;
    log::info!("wrote {} in {:.2}s", out.display(), summary.wall_time);
    // artifacts are written either way; a failed integration still exits nonzero
    Ok(match summary.output.failure() {
        None => 0,
        Some(e) => {
            eprintln!("error: {e}");
            if e.is_admissibility() { 4 } else { 3 }
        }
    })
}

fn sweep(config: &Path, grid: &Path, out: &Path) -> Result<u8, Error> {
    let grid = Grid::parse(&read(grid)?)?;
    let rows = esdg_core::sweep(&read(config)?, &grid, out)?;
    let failed = rows.iter().filter(|r| r.status != "completed").count();
    if failed > 0 {
        log::warn!("{failed} of {} sweep points did not complete", rows.len());
    }
    log::info!("wrote {} rows to {}", rows.len(), out.join("sweep.csv").display());
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, out } => run(config, out),
        Command::Sweep { config, grid, out } => sweep(config, grid, out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
