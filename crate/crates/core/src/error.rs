use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    /// A candidate row would bring the code below its minimum distance.
    /// `row` is the 1-based index of the existing row it clashes with.
    #[error("permutation is at distance {distance} < {d} from row {row}")]
    Incompatible { row: usize, distance: usize, d: usize },

    /// Two rows of a code are closer than the minimum distance. Indices are 1-based.
    #[error("rows ({first},{second}) are at distance {distance} < {d}")]
    Violation {
        first: usize,
        second: usize,
        distance: usize,
        d: usize,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
