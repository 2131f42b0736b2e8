use alloc::string::String;

/// Broad failure class, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Domain,
    Numerical,
    Capacity,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("node set mixes latent and observable nodes")]
    MixedBlock,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid variable scheme: {0}")]
    InvalidScheme(String),
    #[error("block of {count} {block} variables exceeds the limit of {limit}")]
    Capacity {
        block: &'static str,
        count: usize,
        limit: usize,
    },
    #[error("zero probability at {0}")]
    ZeroProbability(String),
    #[error("distribution slice {row} sums to {sum}, expected 1")]
    NotNormalized { row: usize, sum: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("category {value} out of range 1..={max} at row {row}, column {column}")]
    CategoryOutOfRange {
        row: usize,
        column: usize,
        value: usize,
        max: usize,
    },
    #[error("interactions imply a probability below {floor:e} (minimum {min:e})")]
    ProbabilityUnderflow { floor: f64, min: f64 },
    #[error("constraint sets are not nested: {0}")]
    NotNested(String),
    #[error("degrees of freedom must be positive, got {0}")]
    NonPositiveDf(i64),
    #[error("models were fitted on different data")]
    DataMismatch,
    #[error("initial law is not invariant for the transition table (residual {0:e})")]
    NotInvariant(f64),
    #[error("{context}: no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        context: &'static str,
        iterations: usize,
        residual: f64,
    },
    #[error("singular linear system in {0}")]
    Singular(&'static str),
    #[error("line search failed after {halvings} halvings (gradient norm {gradient_norm:e}, objective {objective})")]
    LineSearch {
        halvings: usize,
        gradient_norm: f64,
        objective: f64,
    },
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Capacity { .. } => ErrorCategory::Capacity,
            Error::NonConvergence { .. } | Error::Singular(_) | Error::LineSearch { .. } => {
                ErrorCategory::Numerical
            }
            _ => ErrorCategory::Domain,
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
