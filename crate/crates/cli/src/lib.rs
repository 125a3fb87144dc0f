//! Experiment runner for polar-coded dimmable VLC links: config parsing,
//! Monte Carlo orchestration and CSV output.

pub mod config;
pub mod experiment;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{Axis, ExperimentConfig, ExperimentKind, Grid};
pub use experiment::{
    run_ber_sweep, run_efficiency_table, run_run_length, run_to_csv, run_weight_dist, BerRow,
    RunLengthReport, WeightReport,
};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },

    #[error(transparent)]
    Link(#[from] vlc_polar::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
