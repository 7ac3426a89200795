use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Arithmetic outside the supported field: division by zero, mixed surds.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unknown built-in problem `{0}` (expected ex1, ex2 or ex3)")]
    UnknownBuiltin(String),

    /// The lattice set has no points.
    #[error("lattice set is empty")]
    EmptySet,

    /// No lattice points fall inside the requested box.
    #[error("no lattice points in the region: {0}")]
    EmptyRegion(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no multiplier certificate exists: {0}")]
    CertificateNotFound(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("undecided: {0}")]
    Undecided(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
