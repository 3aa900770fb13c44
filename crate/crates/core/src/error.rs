use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid set partition: {0}")]
    InvalidPartition(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("token {0} has no diagram or matrix in this context")]
    UnsupportedToken(String),
    #[error("operator dimension {requested} exceeds capacity {cap}")]
    Capacity { requested: usize, cap: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("singular constraint: {expr} vanishes")]
    SingularConstraint { expr: String },
    #[error("parameter point is singular: {0}")]
    Singular(String),
    #[error("unconstrained point; closure residuals {residuals:?}")]
    Unconstrained { residuals: Vec<(String, f64)> },
    #[error("unsupported for family {family}: {what}")]
    UnsupportedFamily { family: String, what: String },
    #[error("far-commutativity requires 2l >= m (got m={m}, l={l})")]
    FarCommutativity { m: usize, l: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
