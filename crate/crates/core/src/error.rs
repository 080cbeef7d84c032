use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("axis not found: {0}")]
    AxisNotFound(String),

    #[error("axis {0} appears more than once")]
    DuplicateAxis(String),

    #[error("conditioning axis {0} is not produced by an earlier factor")]
    DanglingAxis(String),

    #[error("axis {name}: expected size {expected}, found {found}")]
    AxisSize {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("not normalized: {0}")]
    NotNormalized(String),

    #[error("invalid probability: {0}")]
    InvalidProbability(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("conditioning event has zero probability")]
    ZeroProbabilityEvent,

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("factorization does not match mode: {0}")]
    ModeMismatch(String),

    #[error("|U| = {u} exceeds the cardinality cap {cap}")]
    Cardinality { u: usize, cap: usize },

    #[error("no feasible point found in {restarts} restarts")]
    Infeasible { restarts: usize },

    #[error("budget exceeded for {what}: requires {required}, limit {limit}")]
    Budget {
        what: String,
        required: f64,
        limit: f64,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid spec at {path}: {message}")]
    Spec { path: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
