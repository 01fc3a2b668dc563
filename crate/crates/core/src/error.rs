use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed JSON at byte {offset}: {message}")]
    Json { offset: usize, message: String },

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("duplicate question id {id:?} at {path}")]
    DuplicateId { id: String, path: String },

    #[error("cannot serialize as SQuAD 1.1: unanswerable questions present ({})", .ids.join(", "))]
    Conversion { ids: Vec<String> },

    #[error("version mismatch: {0}")]
    Version(String),

    #[error("no answer candidates to sample from")]
    NoCandidates,

    #[error("candidate {candidate:?} does not occur in {text:?}")]
    Consistency { candidate: String, text: String },

    #[error("article is not shufflable: {0}")]
    NotShufflable(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema { path: path.into(), message: message.into() }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().display().to_string(), source }
    }
}
