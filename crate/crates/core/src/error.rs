use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("level {requested} out of range (coefficients available up to level {available})")]
    Range { requested: u32, available: u32 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("aliasing: {0}")]
    Aliasing(String),
    #[error("ball not covered by grid: {0}")]
    Coverage(String),
    #[error("degenerate polygon: {0}")]
    Degenerate(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("quadrature did not reach requested accuracy: {0}")]
    Accuracy(String),
    #[error("resource guard: {0}")]
    Resource(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().display().to_string(), source }
    }
}
