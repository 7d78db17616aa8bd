use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;

use config::{Format, RunConfig};
use error::CliError;

/// Floquet-Sambe analysis of a modulated, pumped and driven optical mode.
#[derive(Debug, Parser)]
#[command(name = "floquet-amp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Extra artifacts besides CSV (overrides `output.formats`).
    #[arg(long, global = true, value_enum)]
    format: Vec<Format>,

    /// Override a configuration key, e.g. `--set model.eta_p=58.5`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// |G_nm| heatmap, winding overlay and the two smallest singular values.
    GreenMap,
    /// Local winding numbers over harmonics and reduced frequencies.
    WindingMap,
    /// Optimal input/output singular vectors against the soliton prediction.
    Solitons,
    /// Signal-to-noise ratio, optionally swept over the pump.
    Snr,
    /// Time-domain trajectories compared with the Green's-function steady state.
    Dynamics,
    /// Singular values and winding along one model parameter.
    Sweep,
}

fn run(cli: Cli) -> Result<String, CliError> {
    let mut overrides = cli.overrides.clone();
    if let Some(dir) = &cli.out {
        overrides.push(format!("output.dir={:?}", dir.display().to_string()));
    }
    let mut cfg = RunConfig::load(cli.config.as_deref(), &overrides)?;
    if !cli.format.is_empty() {
        cfg.output.formats = cli.format.clone();
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::GreenMap => commands::green_map(&cfg),
        Command::WindingMap => commands::winding(&cfg),
        Command::Solitons => commands::solitons(&cfg),
        Command::Snr => commands::snr(&cfg),
        Command::Dynamics => commands::dynamics(&cfg),
        Command::Sweep => commands::sweep(&cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
