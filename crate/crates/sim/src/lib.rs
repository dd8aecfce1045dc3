//! Experiment harness for the RIS-CSM link simulator: config files, SNR
//! sweeps with adaptive stopping, deterministic parallel execution, and
//! CSV/JSON emission.

pub mod config;
pub mod output;
pub mod sweep;

use std::fmt;

/// Harness-level error. Config errors carry the offending field path.
#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    Config { path: String, message: String },
    InsufficientPoints { needed: usize, got: usize },
    Runtime(String),
}

impl SimError {
    pub fn config(path: &str, message: impl Into<String>) -> Self {
        SimError::Config { path: path.to_owned(), message: message.into() }
    }

    /// Process exit code: 1 for config errors, 2 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config { .. } => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Config { path, message } => write!(f, "config error at `{path}`: {message}"),
            SimError::InsufficientPoints { needed, got } => {
                write!(f, "need at least {needed} qualifying points, got {got}")
            }
            SimError::Runtime(msg) => write!(f, "runtime error: {msg}"),
        }
    }
}

impl std::error::Error for SimError {}

impl From<ris_csm_core::Error> for SimError {
    fn from(e: ris_csm_core::Error) -> Self {
        SimError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for SimError {
    fn from(e: std::io::Error) -> Self {
        SimError::Runtime(e.to_string())
    }
}
