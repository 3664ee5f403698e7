use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point on or outside the unit circle was passed where the open disk is required.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("not invertible: {0}")]
    NotInvertible(String),

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("semantic error: {0}")]
    Semantic(String),

    /// A sampled modulus assertion required by a kernel family did not hold.
    #[error("range flag failed for {family}: {detail}")]
    RangeFlag { family: String, detail: String },

    #[error("incompatible kernel: {0}")]
    Incompatible(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NonHermitian(f64),

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),
}
