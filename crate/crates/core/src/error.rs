use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("index out of range: {0}")]
    Index(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("operator is not self-adjoint (dot-test discrepancy {discrepancy:.3e})")]
    NotSelfAdjoint { discrepancy: f64 },

    #[error("no convergence after {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("invalid data at byte offset {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("dense mode needs {count} coefficients but the limit is {limit}; use sampled mode")]
    DenseLimit { count: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the iterative numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::NotSelfAdjoint { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Shape { expected, got })
    }
}
