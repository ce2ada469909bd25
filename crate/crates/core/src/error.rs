use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of the model or operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method failed or produced a non-finite value.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The second derivative at the located minimum is not positive.
    #[error("A·N is not convex at f = {f_khz} kHz (Υ = {upsilon})")]
    NonConvex { f_khz: f64, upsilon: f64 },

    /// A feasible transmission set broke the per-slot distance inequality.
    #[error("derivation violated: margin {margin} < 0")]
    DerivationViolation { margin: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
