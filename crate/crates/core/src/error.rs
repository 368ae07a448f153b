use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the function.
    #[error("domain error in {func}: {msg}")]
    Domain { func: &'static str, msg: String },

    /// An infinite series did not reach the requested tolerance.
    #[error("{func}: series did not converge after {terms} terms")]
    SeriesNotConverged { func: &'static str, terms: usize },

    /// Adaptive quadrature ran out of subdivisions.
    #[error("{func}: quadrature did not converge (estimated error {estimate:e} after {subdivisions} subdivisions)")]
    QuadratureNotConverged {
        func: &'static str,
        estimate: f64,
        subdivisions: usize,
    },

    /// The input moments describe a degenerate (zero-variance) law.
    #[error("degenerate moments: {0}")]
    Degenerate(String),

    /// Root finding could not bracket a solution.
    #[error("{func}: root not bracketed")]
    RootNotBracketed { func: &'static str },

    /// A numeric result overflowed the floating point range.
    #[error("{func}: overflow")]
    Overflow { func: &'static str },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            func,
            msg: msg.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numeric_failure(&self) -> bool {
        matches!(
            self,
            Error::SeriesNotConverged { .. }
                | Error::QuadratureNotConverged { .. }
                | Error::RootNotBracketed { .. }
                | Error::Overflow { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite(func: &'static str, name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(func, format!("{name} must be finite, got {v}")))
    }
}
