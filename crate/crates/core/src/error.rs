use thiserror::Error;

/// Errors raised by the numerical engine.
///
/// Configuration problems are kept separate from numerical failures so the
/// command line front end can map them onto distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cannot normalize the zero vector (impossible detection branch)")]
    ZeroVector,

    #[error("neither detector can fire from this state")]
    NoDetectionPossible,

    #[error("photon exhaustion: {needed} photons required but only {available} available")]
    PhotonExhaustion { needed: u64, available: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("fit rejected: {0}")]
    FitRejected(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors that stem from user-supplied configuration rather than
    /// from the numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::InvalidParameter(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
