use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Classification of a provider failure, used to decide retry behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProviderErrorKind {
    /// Missing or rejected credential. Never retried.
    Auth,
    /// The service asked us to back off (HTTP 429).
    RateLimited,
    /// The request timed out in transit.
    Timeout,
    /// The service answered but the payload was not in the expected shape.
    Malformed,
    /// Connection-level or 5xx failure.
    Transport,
}

impl ProviderErrorKind {
    pub fn is_retryable(self) -> bool {
        matches!(
            self,
            ProviderErrorKind::RateLimited | ProviderErrorKind::Timeout | ProviderErrorKind::Transport
        )
    }
}

impl fmt::Display for ProviderErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ProviderErrorKind::Auth => "auth",
            ProviderErrorKind::RateLimited => "rate-limited",
            ProviderErrorKind::Timeout => "timeout",
            ProviderErrorKind::Malformed => "malformed-response",
            ProviderErrorKind::Transport => "transport",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed record: {message}")]
    MalformedRecord {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: no valid documents")]
    EmptyCorpus { path: PathBuf },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("template {template:?} references unknown placeholder {{{placeholder}}}")]
    UnknownPlaceholder {
        template: String,
        placeholder: String,
    },

    #[error("provider error ({kind}): {message}")]
    Provider {
        kind: ProviderErrorKind,
        message: String,
    },

    #[error("document {context_id}: {source}")]
    Document {
        context_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("checkpoint at {path} does not match the current run: {reason}")]
    CheckpointMismatch { path: PathBuf, reason: String },

    #[error("pair {pair_id} references unknown context {context_id}")]
    UnknownContext { pair_id: String, context_id: String },

    #[error("embedding dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("zero vector has no defined direction")]
    ZeroVector,

    #[error("cannot embed empty text")]
    EmptyText,

    #[error("log-probabilities must be non-positive, got {0}")]
    PositiveLogprob(f64),

    #[error("cannot compute a metric over an empty sequence")]
    EmptyInput,

    #[error("prediction/reference ids do not align: {0}")]
    IdMismatch(String),

    #[error("{path}:{line}: duplicate id {id:?}")]
    DuplicateId {
        path: PathBuf,
        line: usize,
        id: String,
    },

    #[error("unsupported shot count {0}: expected 0, 1, or 5")]
    UnsupportedShotCount(usize),

    #[error("{shots}-shot export needs at least {shots} records, corpus yields {available}")]
    InsufficientExemplars { shots: usize, available: usize },

    #[error("invalid split: {0}")]
    InvalidSplit(String),
}

impl Error {
    pub fn provider(kind: ProviderErrorKind, message: impl Into<String>) -> Self {
        Error::Provider {
            kind,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attach the id of the document being processed when a provider call fails.
    pub fn for_document(self, context_id: &str) -> Self {
        Error::Document {
            context_id: context_id.to_string(),
            source: Box::new(self),
        }
    }

    /// The provider failure class, looking through document context wrappers.
    pub fn provider_kind(&self) -> Option<ProviderErrorKind> {
        match self {
            Error::Provider { kind, .. } => Some(*kind),
            Error::Document { source, .. } => source.provider_kind(),
            _ => None,
        }
    }
}
