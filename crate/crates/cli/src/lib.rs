//! Command-line harness around the `tablewalk` library.
//!
//! Every output starts with a header carrying the tool version, the seed and
//! the resolved parameters; rerunning with the same header reproduces the
//! numeric columns byte for byte.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;
pub mod suites;

use std::path::Path;

use args::{Cli, Command};
use config::ExperimentConfig;

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_MAX_GROUP_SIZE: u128 = 1 << 20;

pub const EXIT_OK: i32 = 0;
pub const EXIT_COUNTEREXAMPLE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] tablewalk::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(tablewalk::Error::CapExceeded { .. }) => EXIT_CAP,
            _ => EXIT_INVALID,
        }
    }

    fn io(path: &Path, e: std::io::Error) -> CliError {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    fn csv(e: csv::Error) -> CliError {
        CliError::Io(e.to_string())
    }
}

/// Output of one run and the file it went to, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub outcome: commands::Outcome,
    pub written_to: Option<std::path::PathBuf>,
}

/// Resolves the configuration and runs one subcommand.
pub fn execute(cli: &Cli) -> Result<Run, CliError> {
    let file = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let (flags, command): (ExperimentConfig, fn(&ExperimentConfig) -> _) = match &cli.command {
        Command::Sample(a) => (a.into(), commands::sample),
        Command::TvCurve(a) => (a.into(), commands::tv_curve),
        Command::CutoffTable(a) => (a.into(), commands::cutoff_table),
        Command::Spectrum(a) => (a.into(), commands::spectrum),
        Command::Distribution(a) => (a.into(), commands::distribution),
        Command::Wilson(a) => (a.into(), commands::wilson),
        Command::Verify(a) => {
            let cfg = ExperimentConfig::from(a).over(file);
            let outcome = commands::verify(&cfg, &a.params, a.mutant_flip_cosine)?;
            return finish(&cfg, outcome);
        }
    };
    let cfg = flags.over(file);
    let outcome = command(&cfg)?;
    finish(&cfg, outcome)
}

fn finish(cfg: &ExperimentConfig, outcome: commands::Outcome) -> Result<Run, CliError> {
    if let Some(path) = &cfg.out {
        std::fs::write(path, &outcome.text).map_err(|e| CliError::io(path, e))?;
    }
    Ok(Run { outcome, written_to: cfg.out.clone() })
}

/// Runs the CLI and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(run) => {
            if run.written_to.is_none() {
                print!("{}", run.outcome.text);
            }
            if run.outcome.counterexample {
                EXIT_COUNTEREXAMPLE
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
