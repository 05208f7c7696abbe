use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("sequence is empty")]
    EmptySequence,

    #[error("invalid bit character {0:?} at offset {1}")]
    InvalidBit(u8, usize),

    #[error("model order {0} outside supported range [1, 20]")]
    OrderTooLarge(usize),

    #[error("source parameter {0} must lie strictly between 0 and 1")]
    InvalidParameter(String),

    #[error("transition probability {value} at state {state} outside [0, 1]")]
    InvalidTransition { state: usize, value: String },

    #[error("training sequence of length {len} too short for order {k}")]
    TrainingTooShort { len: usize, k: usize },

    #[error("test sequence of length {len} too short for order {k}")]
    TestTooShort { len: usize, k: usize },

    #[error("system file is empty")]
    EmptySystem,

    #[error("word histogram has no words")]
    NoWords,

    #[error("word lengths differ: {0} vs {1}")]
    WordLengthMismatch(usize, usize),

    #[error("infinite divergence: empirical mass on word {0} where the model has none")]
    InfiniteDivergence(usize),

    #[error("no aggregate row for order {0}")]
    NoSuchOrder(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("missing column {0:?}")]
    MissingColumn(String),

    #[error("bad value {value:?} in column {column:?}")]
    BadValue { column: String, value: String },

    #[error("i/o: {0}")]
    Io(String),

    #[error("malformed gzip stream: {0}")]
    MalformedStream(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
