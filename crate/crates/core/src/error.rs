use thiserror::Error;

/// Errors produced across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("degenerate Tanner graph: {0}")]
    DegenerateGraph(String),

    #[error("invalid degree distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid split plan: {0}")]
    InvalidPlan(String),

    #[error("row {row} has degree {degree}, cannot be split into {theta} parts")]
    RowTooSmall { row: usize, degree: usize, theta: usize },

    #[error("split extension is singular: extended columns have rank {rank} < {expected}")]
    SingularExtension { rank: usize, expected: usize },

    #[error("word is not a codeword: {unsatisfied} parity checks fail")]
    NotACodeword { unsatisfied: usize },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("multi-edge distribution does not normalize: {0}")]
    NormalizationFailure(String),

    #[error("no converging noise level found above {floor}")]
    BracketFailure { floor: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}
