use std::path::PathBuf;
use std::process::ExitCode;

use fracseries::compare::CompareError;
use fracseries::engine::{EngineError, ProblemFileError};
use fracseries::reference_oracle::{GridCsvError, OracleError};
use fracseries::special_functions::SpecialFnError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Problem(#[from] ProblemFileError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    GridCsv {
        path: PathBuf,
        #[source]
        source: GridCsvError,
    },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Compare(#[from] CompareError),
    #[error(transparent)]
    Special(#[from] SpecialFnError),
    #[error("tolerance exceeded: {0}")]
    Breach(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Breach(_) => ExitCode::from(3),
            _ => ExitCode::from(2),
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}
