//! File formats and command line front end for the hybrid-classifier
//! evaluation pipeline.
//!
//! Results are written to files only; stdout stays silent and diagnostics go
//! to stderr. Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime
//! failure.

pub mod checkpoint;
pub mod cli;
pub mod csvio;
pub mod report;

use std::fmt;

pub use cli::run;

/// Errors mapped onto the three nonzero exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    pub fn runtime(err: impl fmt::Display) -> Self {
        CliError::Runtime(err.to_string())
    }

    pub fn data(err: impl fmt::Display) -> Self {
        CliError::Data(err.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {}", msg),
            CliError::Data(msg) => write!(f, "data error: {}", msg),
            CliError::Runtime(msg) => write!(f, "runtime failure: {}", msg),
        }
    }
}

impl std::error::Error for CliError {}
