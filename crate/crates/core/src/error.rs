use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },

    #[error("line {line}: duplicate paragraph_id `{paragraph_id}`")]
    DuplicateParagraph { line: usize, paragraph_id: String },

    #[error("paragraph `{paragraph_id}`: {reason}")]
    InvalidSpan {
        paragraph_id: String,
        reason: String,
    },

    #[error("lexicon conflict for `{lemma}`: `{first}` vs `{second}`")]
    LexiconConflict {
        lemma: String,
        first: String,
        second: String,
    },

    #[error("unknown grammatical category `{0}`")]
    UnknownCategory(String),

    #[error("mention `{mention_id}` does not belong to paragraph `{paragraph_id}`: {reason}")]
    MentionMismatch {
        mention_id: String,
        paragraph_id: String,
        reason: String,
    },

    #[error("invalid sampling plan: {0}")]
    InvalidPlan(String),

    #[error("stratum ({newspaper}, {category}) has {available} mentions, quota is {quota} (short by {})", quota - available)]
    InsufficientStratum {
        newspaper: String,
        category: String,
        available: usize,
        quota: usize,
    },

    #[error("prompt template: {0}")]
    Template(String),

    #[error("backend configuration: {0}")]
    Config(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("prediction for unknown mention `{0}`")]
    UnknownMention(String),

    #[error("invalid graph scope: {0}")]
    Scope(String),

    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("TSV: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn malformed(line: usize, reason: impl Into<String>) -> Self {
        Error::Malformed {
            line,
            reason: reason.into(),
        }
    }

    /// True for failures of the underlying filesystem or stream rather than of the data.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Csv(e) => matches!(e.kind(), csv::ErrorKind::Io(_)),
            Error::Json(e) => e.is_io(),
            _ => false,
        }
    }
}
