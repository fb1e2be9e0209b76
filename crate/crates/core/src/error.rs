use thiserror::Error;

/// Errors raised by the library.
///
/// The variants fall into two families: malformed input (`Input`, `Shape`,
/// `Index`) and inputs that are well-formed but violate a mathematical
/// precondition or could not be processed numerically.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Text or structured input could not be parsed.
    #[error("input error: {0}")]
    Input(String),
    /// Matrix dimensions do not fit the requested operation.
    #[error("shape error: {0}")]
    Shape(String),
    /// An index or index set is out of range or not strictly increasing.
    #[error("index error: {0}")]
    Index(String),
    /// The matrix is singular.
    #[error("singular matrix")]
    Singular,
    /// The input lies outside the domain of the operation, e.g. a matrix
    /// that is not totally positive handed to the Whitney factorization.
    #[error("domain error: {0}")]
    Domain(String),
    /// A float computation hit a pivot or gap below tolerance.
    #[error("conditioning error: {0}")]
    Conditioning(String),
    /// An iteration did not converge within its cap.
    #[error("convergence error: {0}")]
    Convergence(String),
    /// A computed result failed its own postcondition.
    #[error("internal consistency error: {0}")]
    Consistency(String),
}

impl Error {
    /// True for errors caused by malformed input rather than by the
    /// mathematics of a well-formed input.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Input(_) | Error::Shape(_) | Error::Index(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
