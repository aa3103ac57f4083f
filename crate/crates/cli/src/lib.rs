//! Command-line layer over the conic library.
//!
//! Three concerns live here, each in its own module:
//!
//! - [`problem`]: the JSON problem-file format (schema 1) and its conversion
//!   to and from [`renyicone::solver::ConicProblem`];
//! - [`experiments`]: builders and drivers for the mutual-information,
//!   rate-distortion, and fidelity experiments plus the verification suites;
//! - [`report`]: the JSON report envelope every subcommand emits.
//!
//! The binary in `main.rs` only parses arguments, calls one driver, and
//! serializes the report; everything testable is in the library.

use std::path::Path;

pub mod experiments;
pub mod problem;
pub mod report;

/// Errors surfaced by the CLI layer. The numeric core's errors pass through
/// [`CliError::Core`]; everything else is an input problem.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed JSON or a file violating the schema, with the position the
    /// parser stopped at.
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    /// Arguments or file contents outside the documented ranges.
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] renyicone::Error),
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Invalid(msg.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn parse(path: &Path, err: &serde_json::Error) -> Self {
        CliError::Parse {
            path: path.display().to_string(),
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }

    /// Process exit code for this error: 4 for anything wrong with the
    /// inputs, 3 for a numeric failure inside the core. Core errors that can
    /// only come from bad inputs (a start outside the cone, an out-of-range
    /// parameter) count as input problems.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::Invalid(_) | CliError::Io { .. } => 4,
            CliError::Core(
                renyicone::Error::ExteriorPoint(_) | renyicone::Error::InvalidParameter(_),
            ) => 4,
            CliError::Core(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
