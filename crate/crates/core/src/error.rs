use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input value is outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A guarded numerical operation failed (vanishing denominator,
    /// underflow of a branch function, non-finite intermediate).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A nonlinear fit did not converge or the data do not support a fit.
    #[error("fit error: {0}")]
    Fit(String),

    /// A sweep did not resolve the feature it was looking for at the
    /// current resolution.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// A spec or configuration is inconsistent (dimension caps, missing
    /// sections, cross-field checks).
    #[error("configuration error: {0}")]
    Config(String),

    /// Device-description validation failures; collects every failure,
    /// not just the first.
    #[error("validation failed:\n{}", .0.join("\n"))]
    Validation(Vec<String>),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn fit(msg: impl Into<String>) -> Self {
        Error::Fit(msg.into())
    }

    pub fn resolution(msg: impl Into<String>) -> Self {
        Error::Resolution(msg.into())
    }
}
