use thiserror::Error;

/// Errors raised by the numerical kernels and the process/law layers.
///
/// The split between `Domain` and `Numeric` mirrors the CLI exit codes:
/// bad inputs are the caller's fault, numeric failures are ours.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singularity: {0}")]
    Singular(String),

    #[error("moment of order {order} does not exist for nu = {nu}")]
    MomentDoesNotExist { order: u32, nu: f64 },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("underflow: {0}")]
    Underflow(String),

    #[error("numeric failure: {what} (estimate {estimate:e}, error {error:e})")]
    NonConvergence {
        what: String,
        estimate: f64,
        error: f64,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn no_convergence(what: impl Into<String>, estimate: f64, error: f64) -> Self {
        Error::NonConvergence {
            what: what.into(),
            estimate,
            error,
        }
    }

    /// True for errors caused by the inputs rather than the numerics.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Singular(_) | Error::MomentDoesNotExist { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
