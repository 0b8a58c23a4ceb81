// SPDX-License-Identifier: Apache-2.0

//! `subradiance`: lattice cross-talk maps, single-excitation dynamics and
//! dark-state searches driven by a JSON experiment file.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde_json::json;

use commands::{Engine, Run};
use config::ExperimentConfig;
use error::CliError;
use output::{to_json, write_atomic, OutputDir};

#[derive(Parser)]
#[command(name = "subradiance", version, about = "Emitters on finite tight-binding lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[arg(long, global = true, value_enum, default_value_t = Engine::Exact)]
    engine: Engine,

    /// Accepted for scripting; every command is deterministic.
    #[arg(long, global = true)]
    seedless: bool,

    /// Resonance tolerance, overriding `run.tol`.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Eigenmode table: band.csv.
    Dispersion,
    /// Cross-talk ratio of every site against the first atom: map.csv.
    XtalkMap,
    /// Time evolution of the configured initial state: traj.csv.
    Evolve,
    /// Null space of the rate matrix with certification: darkbasis.json.
    Dark,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Dispersion => "dispersion",
            Command::XtalkMap => "xtalk-map",
            Command::Evolve => "evolve",
            Command::Dark => "dark",
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config <file> is required".into()))?;
    let (cfg, raw) = ExperimentConfig::load(path)?;
    let mut out = OutputDir::create(&cli.out)?;
    let mut ctx = Run { cfg: &cfg, tol: cli.tol, out: &mut out };
    let derived = match cli.command {
        Command::Dispersion => commands::dispersion(&mut ctx)?,
        Command::XtalkMap => commands::xtalk_map(&mut ctx)?,
        Command::Evolve => commands::evolve(&mut ctx, cli.engine)?,
        Command::Dark => commands::dark(&mut ctx)?,
    };
    let finished = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let manifest = json!({
        "tool": "subradiance",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cli.command.name(),
        "engine": (cli.command == Command::Evolve).then_some(cli.engine),
        "tol_override": cli.tol,
        "config": raw,
        "derived": derived,
        "outputs": out.files(),
        "wall_clock_seconds": start.elapsed().as_secs_f64(),
        "finished_unix": finished,
    });
    write_atomic(&out.path().join("run_manifest.json"), &to_json(&manifest)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("subradiance: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
