use thiserror::Error;

/// Errors raised by geometry, verification and solver routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Caller passed arguments outside an operation's domain.
    #[error("usage error: {0}")]
    Usage(String),

    /// Model parameters do not describe a valid space.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// A verifier's input does not meet the hypotheses it certifies against
    /// (e.g. a sequence that is not monotone on the visited prefix).
    #[error("input error: {0}")]
    Input(String),

    /// A constrained sampler exhausted its retry budget.
    #[error("sampling failed after {attempts} attempts: {reason}")]
    Sampling { attempts: usize, reason: String },

    /// An iterative solver did not reach its target.
    #[error("solver error: {message} (residual {residual:e})")]
    Solver { message: String, residual: f64 },

    /// Text input (edge lists, expressions, configs) could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
