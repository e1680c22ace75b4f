use std::path::PathBuf;

use thiserror::Error;

/// Exit code for bad input or configuration.
pub const EXIT_INPUT: i32 = 2;
/// Exit code when `oracle-check` finds a duality gap above tolerance.
pub const EXIT_GAP: i32 = 3;
/// Exit code when no start point gives a finite dual objective.
pub const EXIT_INFEASIBLE: i32 = 4;
/// Exit code for oracle checks on more than three atoms.
pub const EXIT_UNSUPPORTED: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },

    #[error("{0}: file is empty")]
    EmptyFile(PathBuf),

    #[error("missing required column `{0}`")]
    MissingColumn(String),

    #[error("row {row}, column `{column}`: cannot parse {text:?} as a number")]
    BadCell {
        row: usize,
        column: String,
        text: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] drovar_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(drovar_core::Error::InfeasibleStart) => EXIT_INFEASIBLE,
            CliError::Core(drovar_core::Error::UnsupportedSize(_)) => EXIT_UNSUPPORTED,
            _ => EXIT_INPUT,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
