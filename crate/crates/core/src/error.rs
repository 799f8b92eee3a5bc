//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by the library.
///
/// Each variant carries a human readable message naming the offending
/// parameter. The command line front end maps [`Error::NoComparison`] to a
/// dedicated exit status and every other variant to an input error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The curvature data fall outside every regime covered by a comparison theorem.
    #[error("no comparison theorem covers this regime: {0}")]
    NoComparison(String),
    /// A discretisation is too coarse for the requested quantity.
    #[error("resolution error: {0}")]
    Resolution(String),
    /// Malformed input data (screens, graphs, problems, configurations).
    #[error("invalid input: {0}")]
    Input(String),
    /// A numerical routine failed to converge or to bracket a root.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn input(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}

/// Rejects NaN and infinite values with a message naming the parameter.
pub(crate) fn finite(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(domain(format!("{name} must be finite, got {value}")))
    }
}
