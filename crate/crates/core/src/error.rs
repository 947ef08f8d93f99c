use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{func} is undefined at {value}")]
    Domain { func: &'static str, value: f64 },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("observation {row} has no component with a finite log-density")]
    DegenerateRow { row: usize },

    #[error("every component was pruned (lambda = {lambda})")]
    AllPruned { lambda: f64 },

    #[error("weighted normal equations for component {component} are singular")]
    Singular { component: usize },

    #[error("insufficient data: need at least {needed} observations, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("size mismatch: {left} estimated components vs {right} true components")]
    SizeMismatch { left: usize, right: usize },

    #[error("no replicates to aggregate")]
    EmptyInput,

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
