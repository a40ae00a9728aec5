use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("at least 3 transmit antennas are required, got {0}")]
    TooFewAntennas(usize),

    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("correlation magnitude must lie in [0, 1), got {0}")]
    CorrelationOutOfRange(f64),

    #[error("ill-conditioned correlation: 1 - |rho|^2 = {0:e} is below the 1e-6 guard")]
    IllConditioned(f64),

    #[error("vector is not unit norm (norm^2 = {0})")]
    NotUnitNorm(f64),

    #[error("non-finite entry in vector")]
    NonFinite,

    #[error("invalid {name}: {value} ({reason})")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{0} failed to converge")]
    NoConvergence(&'static str),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: impl Into<f64>, reason: &'static str) -> Self {
        Error::Domain {
            name,
            value: value.into(),
            reason,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
