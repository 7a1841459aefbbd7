//! Experiment runner: single runs, parameter sweeps, policy comparisons,
//! analytical grids, and their CSV output.

pub mod config;
pub mod csv_out;
pub mod runner;
pub mod scenarios;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::oracle::OracleError;
use crate::sim::SimError;
use crate::topology::TopologyError;

pub use config::{LoadedRun, RunConfig, TopologyFile};
pub use runner::{Axis, SweepSpec};

/// Environment variable that overrides the workload seed of every config.
pub const SEED_ENV: &str = "FRAGSIM_SEED";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid config at '{key}': {message}")]
    Config { key: String, message: String },
    #[error("topology error: {0}")]
    Topology(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("internal error: {0}")]
    Internal(String),
}

impl ExperimentError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        ExperimentError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn config(key: &str, message: impl Into<String>) -> Self {
        ExperimentError::Config {
            key: key.to_string(),
            message: message.into(),
        }
    }

    /// 2 for bad configs, 3 for topology and I/O failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config { .. } => 2,
            ExperimentError::Topology(_) | ExperimentError::Io { .. } => 3,
            ExperimentError::Internal(_) => 1,
        }
    }
}

impl From<TopologyError> for ExperimentError {
    fn from(e: TopologyError) -> Self {
        ExperimentError::Topology(e.to_string())
    }
}

impl From<SimError> for ExperimentError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidConfig(m) => ExperimentError::config("config", m),
            SimError::Workload(w) => ExperimentError::config("workload", w.to_string()),
            other => ExperimentError::Internal(other.to_string()),
        }
    }
}

impl From<OracleError> for ExperimentError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::InvalidProbability { name, value } => {
                ExperimentError::config(name, format!("invalid probability {value}"))
            }
            OracleError::TooFewSites(n) => {
                ExperimentError::config("n", format!("need at least two sites, got {n}"))
            }
            other => ExperimentError::Internal(other.to_string()),
        }
    }
}

/// Seed precedence: explicit flag, then [`SEED_ENV`], then the config.
pub fn resolve_seed_override(flag: Option<u64>) -> Result<Option<u64>, ExperimentError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            ExperimentError::config(SEED_ENV, format!("not an unsigned integer: '{v}'"))
        }),
        Err(_) => Ok(None),
    }
}

pub use runner::{
    compare, oracle_grid, run_single, run_sweep, CompareRow, OracleRow, RunOutcome, SweepRow,
};
