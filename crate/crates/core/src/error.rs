use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" | "))]
    Syntax {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("ambiguous grouping at byte {offset}: a product of {factors} non-scalar factors needs explicit parentheses")]
    AmbiguousGrouping { offset: usize, factors: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("band-limit protocol violated: {0}")]
    ProtocolViolation(String),
    #[error("eigensolver did not converge: {achieved} of {requested} eigenpairs")]
    ConvergenceFailure { achieved: usize, requested: usize },
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
