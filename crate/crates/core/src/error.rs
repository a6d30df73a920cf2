use thiserror::Error;

/// Errors raised while building graphs, configuring coins or running experiments.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("unsupported lattice dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("lattice has no unique center vertex (dimension {0} is even)")]
    NoCenter(usize),

    #[error("state has {actual} amplitudes but the arc table has {expected} arcs")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("oracle instance has {arcs} arcs, above the cap of {cap}")]
    OracleTooLarge { arcs: usize, cap: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
