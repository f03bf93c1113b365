use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while ingesting data or computing certificates.
#[derive(Debug, Error)]
pub enum CertError {
    #[error("size mismatch in {what}: expected {expected}, found {found}")]
    SizeMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("label {label} at position {index} is outside [0, {num_classes})")]
    LabelOutOfRange {
        index: usize,
        label: i64,
        num_classes: usize,
    },
    #[error("at least two classes are required, got {0}")]
    TooFewClasses(usize),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid target class {target} for {num_classes} classes")]
    InvalidClass { target: usize, num_classes: usize },
    #[error("prediction margin is zero; the binary prediction is ambiguous")]
    AmbiguousPrediction,
    #[error("kernel matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("kernel matrix is not positive semidefinite")]
    NotPsd,
    #[error("linear system (Q + lambda I) is singular")]
    Singular,
    #[error("small-C condition violated on partition {partition}: max row abs sum {row_sum} > 1/C = {bound}")]
    SmallCViolation { partition: usize, row_sum: f64, bound: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("flip-cost matrix has no zero at the current vote of classifier {0}")]
    MalformedCosts(usize),
    #[error("instance too large for exhaustive search: {0}")]
    InstanceTooLarge(String),
    #[error("coordinate descent did not converge within {0} sweeps")]
    NonConvergence(usize),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("inconsistent certificate state: {0}")]
    Consistency(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed file {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl CertError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            CertError::SmallCViolation { .. } => 3,
            CertError::NotPsd | CertError::Singular | CertError::NonConvergence(_) | CertError::Consistency(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CertError>;
