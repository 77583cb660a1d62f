//! `mixnorm`: invariant checks, norms, multiplier audits and boundedness
//! experiments on anisotropic mixed-norm spaces.
//!
//! Exit codes: 0 pass, 1 check or experiment failure, 2 usage or config error.

mod commands;
mod config;
mod report;

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::Config;

#[derive(Debug, Parser)]
#[command(name = "mixnorm", version, about = "Anisotropic mixed-norm function space toolkit")]
struct Cli {
    /// TOML configuration file; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the invariant suite.
    CheckInvariants,
    /// Audit the multiplier conditions of a symbol.
    Audit {
        /// Symbol expression in `xi1 .. xin`; overrides `audit.symbol`.
        #[arg(long)]
        symbol: Option<String>,
    },
    /// Boundedness experiment over a seeded ensemble.
    Experiment {
        /// `lifting` or a symbol expression; overrides `experiment.symbol`.
        #[arg(long)]
        symbol: Option<String>,
    },
    /// Norms of a grid function file or of the ensemble.
    Norm {
        /// Grid function descriptor.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CheckInvariants => "check-invariants",
            Command::Audit { .. } => "audit",
            Command::Experiment { .. } => "experiment",
            Command::Norm { .. } => "norm",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Unparseable input is a usage error; anything else raised while running
/// is a failure of the run.
impl From<mixnorm_core::Error> for CliError {
    fn from(e: mixnorm_core::Error) -> Self {
        match e {
            mixnorm_core::Error::Parse(_) => CliError::usage(e.to_string()),
            _ => CliError::failure(e.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    match &cli.command {
        Command::Audit { symbol: Some(s) } => cfg.audit.symbol = s.clone(),
        Command::Experiment { symbol: Some(s) } => cfg.experiment.symbol = s.clone(),
        Command::Norm { input: Some(p) } => {
            cfg.grid = config::GridSection {
                descriptor: Some(p.clone()),
                ..Default::default()
            }
        }
        _ => {}
    }
    let setup = cfg.resolve()?;
    let outcome = match cli.command {
        Command::CheckInvariants => commands::invariants::run(&setup)?,
        Command::Audit { .. } => commands::audit::run(&setup)?,
        Command::Experiment { .. } => commands::experiment::run(&setup)?,
        Command::Norm { .. } => commands::norm::run(&setup)?,
    };
    let text = match cli.format {
        Format::Json => report::to_json(cli.command.name(), &setup.config, &outcome),
        Format::Csv => report::to_csv(&outcome.rows),
    };
    match &cli.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = cli.command.name();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("mixnorm {command}: failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("mixnorm {command}: {e}");
            ExitCode::from(e.code)
        }
    }
}
