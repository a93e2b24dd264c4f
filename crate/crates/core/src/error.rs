use thiserror::Error;

/// Errors produced by the special functions, closed forms and quadrature oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The parity-selected coupling order violates the triangle rule, so no
    /// closed form exists for this bare integral.
    #[error(
        "no closed form for n={power}, lambda1={lambda1}, lambda2={lambda2}: {reason}"
    )]
    FormulaInapplicable {
        power: u32,
        lambda1: u32,
        lambda2: u32,
        reason: String,
    },

    #[error("quadrature did not converge after {evaluations} evaluations (estimate {value:e} +/- {abs_error:e})")]
    NonConvergence {
        evaluations: usize,
        value: f64,
        abs_error: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
