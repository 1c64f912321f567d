use std::path::PathBuf;

use thiserror::Error;

/// Exit status for a run that finished but found no feasible assignment.
pub const EXIT_INFEASIBLE: u8 = 2;
/// Exit status for unreadable, malformed or invalid input.
pub const EXIT_INPUT: u8 = 3;
/// Exit status when the brute-force search space exceeds the cap.
pub const EXIT_CAP: u8 = 4;
/// Exit status of `verify-td` for a decomposition that fails a condition.
pub const EXIT_INVALID_TD: u8 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{line}:{column}: {message}")]
    Syntax {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{origin}: {field}: {message}")]
    Field {
        origin: String,
        field: String,
        message: String,
    },
    #[error("{origin}:{line}: {message}")]
    Line {
        origin: String,
        line: usize,
        message: String,
    },
    #[error("{origin}: {message}")]
    Invalid { origin: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Solver(#[from] localelim::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Solver(localelim::Error::CapExceeded { .. }) => EXIT_CAP,
            _ => EXIT_INPUT,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
