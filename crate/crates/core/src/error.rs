use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed element, bad parameter, or unparseable group spec.
    #[error("rejected input: {0}")]
    InvalidInput(String),

    /// A ball or graph would exceed the configured vertex cap.
    #[error("size cap exceeded at radius {radius}: {count} vertices > cap {cap}")]
    SizeCap {
        radius: u32,
        count: usize,
        cap: usize,
    },

    /// A memory or enumeration limit other than the ball cap.
    #[error("size limit exceeded: {0}")]
    Size(String),

    /// A distance or ball was requested outside the certified region.
    #[error("uncertified distance: {0}")]
    Exactness(String),

    /// A level or parameter lies outside the domain of the construction.
    #[error("domain error: {0}")]
    Domain(String),

    /// Checked integer arithmetic overflowed.
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    /// A cover certificate failed verification.
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
