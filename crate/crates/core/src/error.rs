use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("unknown endpoint `{0}`")]
    UnknownEndpoint(String),

    #[error("arity mismatch: {0}")]
    ArityMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("phase {0} has no exact representation")]
    InexactPhase(String),

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("invalid position {0:?}")]
    InvalidPosition(Vec<usize>),

    #[error("pattern does not match at {0:?}")]
    MatchMismatch(Vec<usize>),

    #[error("invalid rule: {0}")]
    InvalidRule(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("canonical hash collision between `{0}` and `{1}`")]
    HashCollision(String, String),

    #[error("canonicalizer mismatch: `{0}` vs `{1}`")]
    CanonicalizerMismatch(String, String),

    #[error("graph contains a cycle")]
    Cycle,

    #[error("{0}")]
    Other(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse { offset, message: message.into() }
    }
}
