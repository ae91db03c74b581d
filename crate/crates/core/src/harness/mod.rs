//! Seeded Monte Carlo sweeps, CSV output and approximation validation.

mod config;
mod output;
mod runner;
mod validate;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{parse_key_values, parse_number_list, ExperimentConfig, Method};
pub use output::{emit_approx_csv, emit_csv, format_sig6, CSV_HEADER};
pub use runner::{run_experiment, ExperimentResult, ResultCell, WORKERS_ENV};
pub use validate::{
    measure_cb_gap, measure_ls_gap, measure_qmax, validate_approximations, validate_approximations_with,
    ApproxTable, ApproxValidationConfig, CbGapMeasurement, CbGapRow, GapRow, QmaxRow,
};

/// Errors surfaced by the harness and CLI.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Model(#[from] crate::Error),
}

impl HarnessError {
    /// Process exit code: 2 for configuration, 3 for I/O, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Io { .. } => 3,
            HarnessError::Model(_) => 1,
        }
    }
}
