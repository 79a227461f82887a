use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid similitude: {0}")]
    InvalidSimilitude(String),
    #[error("invalid weighted IFS: {0}")]
    InvalidWifs(String),
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("selection must be a strict subset of all words of the level")]
    NotStrictSubset,
    #[error("selection is empty")]
    EmptySelection,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionError { expected: usize, got: usize },
    #[error("point set is empty")]
    EmptySet,
    #[error("box is not invariant under the maps: {0}")]
    InvalidInvariantSet(String),
    #[error("order r = {0} is not positive; use the geometric-mean (D0) path")]
    UseD0Path(f64),
    #[error("measure is not a probability measure (total mass {0})")]
    NotNormalized(f64),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate dimension fit: {0}")]
    DegenerateFit(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
