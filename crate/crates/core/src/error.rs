use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} at index {index} is outside [0, 1] or not finite")]
    Domain { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("model has no categories")]
    EmptyModel,

    #[error("category {category}: lower corner {lower} exceeds upper corner {upper} at coordinate {coord}")]
    Integrity {
        category: usize,
        coord: usize,
        lower: f64,
        upper: f64,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("topic `{0}` has no relevant documents")]
    SkipTopic(String),

    #[error("corpus `{corpus}`: topic sets differ between vectorizers; not shared by all: {}", .topics.join(", "))]
    TopicMismatch { corpus: String, topics: Vec<String> },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
