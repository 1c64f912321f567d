//! File formats and subcommand implementations for the `localelim` binary.

pub mod commands;
pub mod dot;
pub mod error;
pub mod problem_file;
pub mod seq_file;
pub mod td_file;

pub use error::{CliError, Result};

use std::path::Path;

/// Reads a whole file, attaching the path to any I/O error.
pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_problem(path: &Path) -> Result<localelim::Problem> {
    problem_file::parse_problem(&read_file(path)?, &path.display().to_string())
}
