//! Batch front end for wiretap code design: single designs, secrecy-rate
//! sweeps, oracle validation and kernel analysis, reported as JSON and CSV.

pub mod config;
pub mod design;
pub mod engine;
pub mod kernel;
pub mod sweep;
pub mod validate;

use serde::Serialize;
use thiserror::Error;

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] polar_wiretap::Error),
    #[error("{0}")]
    Io(String),
    /// A sweep cell that cannot be built with the given configuration.
    #[error("{0}")]
    Skipped(String),
}

impl CliError {
    /// Process exit code: 2 for invalid input, 1 for I/O failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl ToolInfo {
    pub fn current() -> Self {
        Self {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}
