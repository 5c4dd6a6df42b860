use thiserror::Error;

/// Errors raised by the screening toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The estimating-function sample cannot carry an EL statistic (too few rows,
    /// identical values, or a numerically singular second-moment matrix).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("domain violation: 1 + lambda'g_i = {value} <= 0 at row {row}")]
    DomainViolation { row: usize, value: f64 },

    #[error("feature {0} has zero sample variance")]
    ConstantColumn(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("covariance matrix is not positive definite (min eigenvalue {0:e})")]
    InvalidCovariance(f64),

    #[error("marginal logistic fit for feature {0} diverged")]
    Separation(usize),

    #[error("no convergence after {0} sweeps")]
    NonConvergence(usize),

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("non-numeric cell at row {row}, column `{column}`: {cell:?}")]
    NonNumericCell { row: usize, column: String, cell: String },

    #[error("ragged row {row}: expected {expected} fields, found {found}")]
    RaggedRow { row: usize, expected: usize, found: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
