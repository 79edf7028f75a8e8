use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("infeasible experiment: {0}")]
    Infeasible(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl ExperimentError {
    /// Process exit code: 2 for bad configuration, 3 for infeasible runs.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 2,
            ExperimentError::Infeasible(_) => 3,
            ExperimentError::Io(_) => 1,
        }
    }
}

pub(crate) fn config<E: std::fmt::Display>(e: E) -> ExperimentError {
    ExperimentError::Config(e.to_string())
}

pub(crate) fn infeasible<E: std::fmt::Display>(e: E) -> ExperimentError {
    ExperimentError::Infeasible(e.to_string())
}
