use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const INCONCLUSIVE: i32 = 2;
    pub const INPUT: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at line {line}, column {column}: {message}")]
    Config { line: usize, column: usize, message: String },

    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Core(#[from] reebcalc::Error),

    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use reebcalc::Error as E;
        match self {
            // Numerical breakdown says nothing about the input's validity.
            CliError::Core(E::NoConvergence { .. } | E::StepUnderflow { .. } | E::Singular { .. }) => exit::INCONCLUSIVE,
            _ => exit::INPUT,
        }
    }
}
