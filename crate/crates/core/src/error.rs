use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of the function.
    #[error("{func}: argument outside domain ({detail})")]
    Domain { func: &'static str, detail: String },
    /// Series or iteration hit its term cap.
    #[error("{func}: no convergence after {terms} terms")]
    Convergence { func: &'static str, terms: usize },
    /// Adaptive quadrature could not meet its tolerance within the budget.
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    /// Rejected model configuration.
    #[error("invalid configuration: {0}")]
    Invalid(String),
    /// Two sets of normalising constants with different mixture weight `p`.
    #[error("mixture weights differ (p1 = {0}, p2 = {1}); ordering is only defined for equal p")]
    MixtureMismatch(f64, f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(func: &'static str, detail: impl Into<String>) -> Result<T> {
    Err(Error::Domain {
        func,
        detail: detail.into(),
    })
}
