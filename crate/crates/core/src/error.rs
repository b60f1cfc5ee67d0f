use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The requested sequence would contain no points.
    #[error("empty sequence: {0}")]
    EmptySequence(String),

    /// A parameter lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Floating point round-off in the lattice basis could exceed the
    /// tolerance used to decide membership of boundary points.
    #[error("ill-conditioned lattice basis (estimated coordinate error {0:e})")]
    Conditioning(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
