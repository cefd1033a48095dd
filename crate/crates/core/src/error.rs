//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by feature extraction, training and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration (bad FFT size, too many channels, missing class, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Shapes of two operands do not line up.
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    /// A non-finite value appeared during network evaluation.
    #[error("numeric error in layer `{layer}`: {detail}")]
    Numeric { layer: &'static str, detail: String },

    /// Score sets that cannot be evaluated (an empty side, unknown attack ids, ...).
    #[error("evaluation error: {0}")]
    Eval(String),

    /// An utterance with zero frames cannot be scored.
    #[error("empty utterance: no frames to score")]
    EmptyUtterance,

    /// Malformed binary artifact; `offset` is the byte position where decoding failed.
    #[error("format error at byte {offset}: {detail}")]
    Format { offset: u64, detail: String },

    /// Malformed text input (manifests, score files); `line` is 1-based.
    #[error("{path}:{line}: parse error: {detail}")]
    Parse {
        path: String,
        line: usize,
        detail: String,
    },

    /// Failure while processing one utterance of a batch.
    ///
    /// The cause is folded into the message rather than exposed through
    /// `source()`, so chain-printing wrappers do not repeat it.
    #[error("utterance `{utt}`: {cause}")]
    Utterance { utt: String, cause: Box<Error> },

    #[error("I/O error on `{path}`: {cause}")]
    Io {
        path: String,
        cause: std::io::Error,
    },

    #[error("JSON error on `{path}`: {cause}")]
    Json {
        path: String,
        cause: serde_json::Error,
    },
}

impl Error {
    /// Attach an utterance id to an error bubbling out of a per-utterance stage.
    pub fn for_utterance(self, utt: impl Into<String>) -> Self {
        Error::Utterance {
            utt: utt.into(),
            cause: Box::new(self),
        }
    }

    pub(crate) fn io(path: &std::path::Path, cause: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            cause,
        }
    }

    pub(crate) fn json(path: &std::path::Path, cause: serde_json::Error) -> Self {
        Error::Json {
            path: path.display().to_string(),
            cause,
        }
    }

    pub(crate) fn parse(path: &std::path::Path, line: usize, detail: impl Into<String>) -> Self {
        Error::Parse {
            path: path.display().to_string(),
            line,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
