use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("degree error: {0}")]
    Degree(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("arity mismatch: form of degree {degree} evaluated on {given} vectors")]
    Arity { degree: usize, given: usize },

    #[error("structural error: {0}")]
    Structure(String),

    #[error("contact condition violated: {0}")]
    ContactViolation(String),

    #[error("singular system in {context} (pivot {pivot:e})")]
    Singular { context: &'static str, pivot: f64 },

    #[error("no convergence in {context}")]
    NoConvergence { context: &'static str },

    #[error("point off the manifold: {0}")]
    OffManifold(String),

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("pullback of the target contact form differs from the source form (sup deviation {deviation:e})")]
    PullbackMismatch { deviation: f64 },

    #[error("unknown fixture '{0}'")]
    UnknownFixture(String),
}

pub type Result<T> = std::result::Result<T, Error>;
