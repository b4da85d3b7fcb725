use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),
    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("cannot ungraft identity")]
    UngraftLeaf,
    #[error("inconsistent Euler characteristic: order {order}, genus {genus}")]
    InconsistentEuler { order: usize, genus: usize },
    #[error("label count mismatch: expected {expected}, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("invalid loop graph: {0}")]
    InvalidGraph(String),
    #[error("{0}")]
    Unsupported(String),
}

/// A parse failure with its byte offset in the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(offset: usize, message: impl Into<String>) -> Self {
        Self {
            offset,
            message: message.into(),
        }
    }
}
