use p3p_core::experiments::ExperimentError;
use p3p_core::oracle::OracleError;
use p3p_core::{GeomError, SolveError};
use thiserror::Error;

/// Everything that ends a command early, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    OnToroidPair(String),
    #[error("{0}")]
    PathDegenerate(String),
    #[error("{0}")]
    Violation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::OnToroidPair(_) => 3,
            CliError::PathDegenerate(_) => 4,
            CliError::Violation(_) => 5,
            CliError::Io(_) => 1,
        }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::OnToroidPair(_) => CliError::OnToroidPair(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::PathDegenerate(_) | ExperimentError::Geom(_) => CliError::PathDegenerate(e.to_string()),
            ExperimentError::Solve(s) => match s {
                SolveError::OnToroidPair(_) => CliError::OnToroidPair(s.to_string()),
                other => CliError::PathDegenerate(other.to_string()),
            },
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
