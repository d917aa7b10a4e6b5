//! Configuration, scenario presets, run output and parameter sweeps.
//!
//! The `coopspread` binary is a thin wrapper over these functions.

mod config;
mod report;
mod run;
mod scenario;
mod sweep;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::{
    flatten, parse_config, parse_config_str, parse_flat_str, read_flat, render_flat, FlatConfig,
    GridSpec, ObserveSpec, OutputSpec, RunConfig, TimeSpec,
};
pub use report::{fit_traces, parse_coop_params, theory_report, FittedTrace, TheoryReport};
pub use run::{execute, read_fronts_csv, run, Execution, RunOutcome, ARTIFACTS};
pub use scenario::{scenario, SCENARIOS};
pub use sweep::{parse_sweep, parse_sweep_str, sweep, SweepRow, SweepSpec};

use crate::solver::SolverError;

/// Process exit status for configuration problems.
pub const EXIT_CONFIG: i32 = 2;
/// Process exit status for failed properties or verdicts.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("file not found: {0}")]
    MissingFile(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: syntax error: {message}")]
    Syntax { path: String, message: String },
    #[error("{key}: {message}")]
    Schema { key: String, message: String },
    #[error("{fields}: {message}")]
    Invariant { fields: String, message: String },
    #[error("unknown scenario `{0}` (known: {known})", known = SCENARIOS.join(", "))]
    UnknownScenario(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub(crate) fn schema(key: &str, message: impl Into<String>) -> Self {
        CliError::Schema { key: key.to_string(), message: message.into() }
    }

    pub(crate) fn invariant(fields: &str, message: impl Into<String>) -> Self {
        CliError::Invariant { fields: fields.to_string(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(_) => EXIT_FAILURE,
            _ => EXIT_CONFIG,
        }
    }
}
