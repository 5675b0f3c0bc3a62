use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("ordering is not a permutation of {0} vertices")]
    NotAPermutation(usize),

    #[error("ordering is not topological: arc ({from}, {to}) is violated")]
    NotTopological { from: usize, to: usize },

    #[error("position {position} out of range [1, {n}]")]
    PositionOutOfRange { position: usize, n: usize },

    #[error("problem expects a {expected} graph")]
    DirectionMismatch { expected: &'static str },

    #[error("graph is not regular")]
    NotRegular,

    #[error("vertex set must be nonempty")]
    EmptySet,

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("generation failed after {attempts} attempts: {reason}")]
    RetriesExhausted { attempts: usize, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}
