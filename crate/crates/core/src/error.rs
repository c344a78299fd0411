use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input data: non-finite entries, ragged shapes, mismatched dimensions.
    #[error("validation error: {0}")]
    Validation(String),
    /// A parameter is outside the domain the method is defined on.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical routine failed to converge or produced a non-finite value.
    #[error("numerical error: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
