use std::path::PathBuf;

/// Errors produced by the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("phrase is empty")]
    EmptyPhrase,

    #[error("term {0:?} tokenizes to nothing")]
    Unembeddable(String),

    #[error("no candidate concepts occur in the corpus")]
    NoCandidates,

    #[error("tokens at {doc_id}:{offset} do not match phrase {phrase:?}")]
    OccurrenceMismatch {
        doc_id: String,
        offset: usize,
        phrase: String,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("abbreviation {0:?} has fewer than two classes; nothing to disambiguate")]
    SingleClass(String),

    #[error("no samples to score")]
    NoSamples,

    #[error("unknown document id {0:?}")]
    UnknownDocument(String),

    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}
