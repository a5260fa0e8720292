use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("need at least 2 categories, got {0}")]
    TooFewCategories(usize),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("negative count {value} at index {index}")]
    NegativeCount { index: usize, value: i64 },

    #[error("all counts are zero")]
    AllZero,

    #[error("weight {value} at index {index} must be finite and strictly positive")]
    InvalidWeight { index: usize, value: f64 },

    #[error("concentration {value} at index {index} must be finite and strictly positive")]
    InvalidConcentration { index: usize, value: f64 },

    #[error("objective value {value} at index {index} is outside [0, 1]")]
    ObjectiveOutOfRange { index: usize, value: f64 },

    #[error("point is not in the open simplex (component {index} = {value})")]
    BoundaryPoint { index: usize, value: f64 },

    #[error("point does not sum to 1 (sum = {0})")]
    NotOnSimplex(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("undefined quantity: {0}")]
    Undefined(&'static str),

    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("graph parse error at line {line}, column {column}: {message}")]
    GraphParse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("no parking lot is reachable from the origin in slot {0}")]
    Unreachable(usize),

    #[error("slot {slot} out of range (problem has {slots} slots)")]
    SlotOutOfRange { slot: usize, slots: usize },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("population collapsed: no valid chromosome after {0} attempts")]
    PopulationCollapse(usize),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
