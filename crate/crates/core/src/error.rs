use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("input is not square: row {row} has {found} entries, expected {expected}")]
    NotSquare {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("illegal token {token:?} at row {row}, column {col}")]
    IllegalToken {
        token: String,
        row: usize,
        col: usize,
    },
    #[error("order {found} is below the minimum {min}")]
    OrderTooSmall { found: usize, min: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid signature: entries must be +1 or -1")]
    InvalidSignature,
    #[error("unknown family index {0} (expected 1, 2 or 3)")]
    UnknownFamily(u8),
    #[error("matrix is not in the qualitative class of any family pattern")]
    NotInFamily,
    #[error("arrow matrix is not in the qualitative class of family {0}")]
    NotInClass(u8),
    #[error("arrow parameters malformed: {0}")]
    MalformedArrow(String),
    #[error("all diagonal parameters b_j are distinct")]
    NoRepeatedB,
    #[error("diagonal parameters b_j are not distinct")]
    RepeatedB,
    #[error("merging rows {j} and {k} gives a zero first-column entry")]
    DegenerateMerge { j: usize, k: usize },
    #[error("zero polynomial has no refined inertia")]
    ZeroPolynomial,
    #[error("eigenvalue solver failed to converge")]
    EigenSolverFailed,
    #[error("witness search exhausted its budget of {budget} tries for {inertia}")]
    SearchExhausted { budget: usize, inertia: String },
    #[error("internal check failed: {0}")]
    CheckFailed(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
