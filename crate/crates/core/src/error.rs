use thiserror::Error;

/// Errors raised by the algebra, classification and cache layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("scalars from different fields: Q(zeta_{left}) vs Q(zeta_{right})")]
    ContextMismatch { left: u64, right: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not a root of unity of the context order")]
    NotRootOfUnity,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("elements belong to different algebras")]
    HandleMismatch,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("rewrite system did not complete: {0}")]
    Completion(String),
    #[error("internal verification failed: {0}")]
    Verification(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
