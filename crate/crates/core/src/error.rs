use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("certificate error: {0}")]
    Certificate(String),
    #[error("structural error: {0}")]
    Structural(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, col, msg: msg.into() }
    }
}
