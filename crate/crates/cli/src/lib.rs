//! Experiment harness for the Kawahara/KdV toolkit: parses flat key=value
//! configs, schedules runs, and emits deterministic CSV reports plus
//! optional SVG plots. The binary front-end lives in `main.rs`.

use thiserror::Error;

pub mod config;
pub mod data;
pub mod experiments;
pub mod plot;
pub mod report;

/// Harness failure modes; configuration problems map to exit code 2,
/// everything else to 1.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("run failed: {0}")]
    Run(String),
}

impl From<kawahara_core::Error> for HarnessError {
    fn from(e: kawahara_core::Error) -> Self {
        HarnessError::Run(e.to_string())
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Run(format!("io: {e}"))
    }
}
