//! Experiment driver for the `psclab` binary: configuration files, α sweeps,
//! CSV/SVG output and the verification suite.

pub mod config;
pub mod output;
pub mod plot;
pub mod sweep;
pub mod verify;

use std::path::PathBuf;

pub use config::{ConfigError, ExperimentConfig};
pub use output::{run_experiment, Overrides, RunSummary, SweepKind};
pub use plot::{emit_plot, render_svg};
pub use sweep::{pa_sweep, sweep_alpha, Estimator, SweepRow};
pub use verify::{verify_suite, Scope, VerifyReport};

/// Everything the driver can fail with, mapped onto process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("numeric failure: {0}")]
    Numeric(#[from] psclab::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for configuration and I/O problems, 2 for failed checks, 3 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Verification(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}
