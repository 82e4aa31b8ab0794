use thiserror::Error;

#[derive(Debug, Error)]
pub enum FlockError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible state: {0}")]
    InfeasibleState(String),

    #[error("attraction-repulsion potential has no minimum: {0}")]
    NoMinimum(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("infeasible scenario: {0}")]
    InfeasibleScenario(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, FlockError>;

pub(crate) fn invalid(msg: impl Into<String>) -> FlockError {
    FlockError::InvalidArgument(msg.into())
}
