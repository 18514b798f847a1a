use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("invalid input at index {index}: {msg}")]
    Validation { index: usize, msg: String },

    #[error("function is not in the cone of nonnegative nonincreasing functions: {0}")]
    NotInCone(String),

    #[error("quadrature did not converge: estimate {estimate} with error {error_estimate} after {evaluations} evaluations")]
    NonConvergence {
        estimate: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("piece {index} on ({lo}, {hi}] is not integrable: {msg}")]
    NotIntegrable {
        index: usize,
        lo: f64,
        hi: f64,
        msg: String,
    },

    #[error("result not representable as a piecewise form: {0}")]
    Unrepresentable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain {
        op,
        msg: msg.into(),
    }
}
