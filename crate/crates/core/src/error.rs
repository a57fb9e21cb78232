use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} features but {right} labels")]
    LengthMismatch { left: usize, right: usize },

    #[error("support set is empty")]
    EmptySupport,

    #[error("classifier has no registered classes")]
    Untrained,

    #[error("cosine distance is undefined for a zero vector")]
    ZeroVector,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value in row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("covariance is singular after {attempts} ridge escalations (last ridge {ridge:e})")]
    SingularCovariance { attempts: usize, ridge: f64 },

    #[error(
        "requested {requested} embedding dimensions but only {available} positive eigenpairs exist"
    )]
    EmbeddingDims { requested: usize, available: usize },

    #[error("eigensolver did not converge: {0}")]
    EigenSolver(String),

    #[error("dataset has {available} classes, episode needs {needed}")]
    InsufficientClasses { needed: usize, available: usize },

    #[error("class {class} has {available} samples, episode needs at least {needed}")]
    InsufficientSamples {
        class: String,
        needed: usize,
        available: usize,
    },

    #[error("feature file parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("feature file truncated: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },

    #[error("NaN or infinite feature value in record {record}")]
    NonFiniteFeature { record: usize },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// True for errors caused by the caller's data rather than by its arguments.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::InvalidParameter(_))
    }
}
