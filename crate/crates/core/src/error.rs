use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid Lie pair: {0}")]
    InvalidPair(String),

    #[error("invalid module: {0}")]
    InvalidModule(String),

    #[error("form is not closed: {0}")]
    NotClosed(String),

    #[error("connection does not extend the action: {0}")]
    NotExtendingAction(String),

    #[error("degenerate or invalid symplectic form: {0}")]
    Symplectic(String),

    #[error("invalid diagram: {0}")]
    Diagram(String),

    #[error("inconsistent choices: {0}")]
    Choice(String),

    #[error("request too large: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
