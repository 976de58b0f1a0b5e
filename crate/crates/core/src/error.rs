use thiserror::Error;

/// Errors produced by encoders, the regression solver, the CV harness and the I/O layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,
    #[error("non-finite input")]
    NonFinite,
    #[error("invalid probability: {0}")]
    InvalidProbability(f64),
    #[error("degenerate blend")]
    DegenerateBlend,
    #[error("invalid hyperparameter: {0}")]
    InvalidParameter(String),
    #[error("unknown column: {0}")]
    UnknownColumn(String),
    #[error("column {0} is not categorical")]
    NotCategorical(String),
    #[error("dataset has no rows")]
    EmptyDataset,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{0}")]
    InvalidConfig(String),
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
