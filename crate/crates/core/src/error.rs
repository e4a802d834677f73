use std::path::PathBuf;

use crate::types::{CategoryCode, JournalId, PaperId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: u64,
        message: String,
    },

    #[error("invalid category scheme: {0}")]
    Scheme(String),

    #[error("unknown category code {0}")]
    UnknownCategory(CategoryCode),

    #[error("empty category assignment set")]
    EmptyAssignment,

    #[error("unknown paper {0}")]
    UnknownPaper(PaperId),

    #[error("unknown journal {0}")]
    UnknownJournal(JournalId),

    #[error("no active references in generation")]
    NoActiveReferences,

    #[error("empty shares")]
    EmptyShares,

    #[error("unclassifiable paper {0}")]
    UnclassifiablePaper(PaperId),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("empty classification")]
    EmptyClassification,

    #[error("no papers shared by the compared classifications")]
    EmptyIntersection,

    #[error("identifier space overflow: {0}")]
    IdOverflow(String),

    #[error("infeasible synthetic parameters: {0}")]
    InfeasibleParams(String),

    #[error("invalid classification: {0}")]
    InvalidClassification(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(file: impl Into<String>, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            message: message.into(),
        }
    }
}
