use thiserror::Error;

use crate::corpus::ValidationReport;
use crate::sentiment::Sentiment;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("sample {id}: {message}")]
    Label { id: i64, message: String },

    #[error("duplicate sample id {0}")]
    DuplicateId(i64),

    #[error("split error: {0}")]
    Split(String),

    #[error("length mismatch: {left} vs {right}")]
    Arity { left: usize, right: usize },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("format error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Format { line: Option<usize>, message: String },

    #[error("degenerate labels: {message}")]
    DegenerateLabels {
        /// The class whose absence caused the failure, when there is one.
        missing: Option<Sentiment>,
        message: String,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dim { expected: usize, found: usize },

    #[error("node has no samples")]
    DegenerateNode,

    #[error("loss became non-finite")]
    NonFiniteLoss,

    #[error("sequence has no unmasked positions")]
    EmptySequence,

    #[error("nothing to evaluate")]
    EmptyEval,

    #[error("unknown preset {name:?}; valid presets: {}", valid.join(", "))]
    Preset { name: String, valid: Vec<String> },

    #[error("config error: {0}")]
    Config(String),

    #[error("artifact error: {0}")]
    Artifact(String),

    #[error("predictions failed validation: {0}")]
    Validation(ValidationReport),

    #[error("{member} member: {source}")]
    Member {
        member: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn missing_class(class: Sentiment) -> Self {
        Error::DegenerateLabels {
            missing: Some(class),
            message: format!("class {} has no training samples", class.value()),
        }
    }

    pub(crate) fn parse_json(raw: &[u8], err: &serde_json::Error) -> Self {
        Error::Parse {
            offset: byte_offset(raw, err.line(), err.column()),
            message: err.to_string(),
        }
    }

    /// Strips any `Member` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Member { source, .. } => source.root(),
            other => other,
        }
    }
}

/// Converts serde_json's 1-based line/column into a byte offset.
fn byte_offset(raw: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start = raw
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == b'\n')
        .nth(line.saturating_sub(2))
        .map(|(i, _)| i + 1)
        .filter(|_| line > 1)
        .unwrap_or(0);
    (line_start + column.saturating_sub(1)).min(raw.len())
}
