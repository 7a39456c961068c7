//! `upwave` — experiment runner for the absorbing-wave-guide study.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric failure
//! (tolerance not met), 4 protocol failure (decode mismatch or a negative
//! simultaneity margin; the report is still written).

mod config;
mod runs;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{default_config, ExperimentConfig};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    Protocol(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric error: {m}"),
            CliError::Protocol(m) => write!(f, "protocol failure: {m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Protocol(_) => 4,
        }
    }
}

#[derive(Parser)]
#[command(name = "upwave", version, about = "Absorbing-wave-guide signal experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a figure dataset, the decode experiment, or the validity report.
    Run {
        /// One of fig1..fig6, decode, validate.
        target: String,
        /// Config file (TOML, or JSON by extension); built-in defaults otherwise.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (default: $UPWAVE_OUT, then ./out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker thread count (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn run(cmd: Command) -> Result<(), CliError> {
    let Command::Run { target, config, out, threads } = cmd;
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let cfg: ExperimentConfig = match &config {
        Some(path) => ExperimentConfig::load(path)?,
        None => default_config(&target),
    };
    let out = runs::resolve_out(out);
    match target.as_str() {
        "fig1" | "fig2" | "fig3" | "fig4" | "fig5" | "fig6" => {
            runs::run_figure(&target, &cfg, &out)
        }
        "decode" => runs::run_decode(&cfg, &out),
        "validate" => runs::run_validate(&cfg, &out),
        other => Err(CliError::Config(format!(
            "unknown target {other:?}; expected fig1..fig6, decode, or validate"
        ))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
