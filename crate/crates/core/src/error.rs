use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: weight {weight} is below 1")]
    NonPositiveWeight { line: usize, weight: i128 },

    #[error("line {line}: vertex {vertex} outside [1, {n}]")]
    VertexOutOfRange { line: usize, vertex: u64, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("arithmetic range exceeded: {0}")]
    Overflow(String),

    #[error("graph has {n} vertices; all-pairs checks are limited to {max}")]
    TooLarge { n: usize, max: usize },

    #[error("mismatch: {0}")]
    Mismatch(String),

    #[error("hopset was built without path recording")]
    MissingRecording,

    #[error("hopset carries no witness paths")]
    NotPathReporting,

    #[error("vertex {to} is unreachable from {from}")]
    Unreachable { from: u32, to: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
