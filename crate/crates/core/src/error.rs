use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed input: asymmetric matrices, out-of-range entries, bad lengths.
    #[error("validation error: {0}")]
    Validation(String),

    /// The request exceeds a fixed enumeration or storage bound.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// An iterative solver stopped before reaching its tolerance.
    #[error("convergence error after {iterations} iterations (residual {residual:e}): {context}")]
    Convergence {
        context: String,
        iterations: usize,
        residual: f64,
    },

    /// Structure not handled by the operation (e.g. a graph with a cycle).
    #[error("unsupported structure: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
