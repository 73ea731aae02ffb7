use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("invalid grid: {}", .0.join("; "))]
    InvalidGrid(Vec<String>),

    #[error("no sign change of det(I - lambda K) on [{lambda_start}, {lambda_max}]")]
    NoSignChange {
        lambda_start: f64,
        lambda_max: f64,
        /// `(lambda, sign of determinant)` for every scanned point.
        trace: Vec<(f64, f64)>,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
