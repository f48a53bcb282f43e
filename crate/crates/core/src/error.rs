use thiserror::Error;

/// Errors produced by graph construction and the algebraic operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpaError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("duplicate identifier `{0}`")]
    DuplicateIdentifier(String),
    #[error("paths are not composable: range `{0}` does not match source `{1}`")]
    NonComposable(String, String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid monomial: {0}")]
    InvalidMonomial(String),
    #[error("invalid projective spec: {0}")]
    InvalidSpec(String),
    #[error("monoid generator outside the supplied universe: {0}")]
    OutsideUniverse(String),
    #[error("out-split rejected: {0}")]
    OutSplit(String),
    #[error("pipeline error: {0}")]
    Pipeline(String),
    #[error("element is not supported on this graph: {0}")]
    Unsupported(String),
    #[error("{0}")]
    Usage(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl LpaError {
    pub fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        LpaError::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, LpaError>;
