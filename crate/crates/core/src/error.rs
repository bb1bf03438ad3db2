use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no selectable candidate: every log-weight is -inf")]
    NoSelectableCandidate,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("autocorrelation time undefined for a constant series")]
    UndefinedAct,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("config error in {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("sampler invariant violated: {0}")]
    Invariant(String),

    #[error("replicate {replicate} failed: {source}")]
    Replicate {
        replicate: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by a bad experiment description rather than
    /// a failure while running it.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. } | Error::InvalidParameter(_))
    }
}
