use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("affine map is singular")]
    SingularMap,
    #[error("homothets disagree on the ratio")]
    RatioMismatch,
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("sandwich inclusions do not hold")]
    SandwichInvalid,
    #[error("transferred ratio {0} is not below 1")]
    RatioOverflow(String),
    #[error("no candidate map yields a factor below the cap")]
    NoCandidate,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
