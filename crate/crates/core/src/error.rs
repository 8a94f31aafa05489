use thiserror::Error;

pub type Result<T> = std::result::Result<T, HdgError>;

#[derive(Debug, Error)]
pub enum HdgError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported degree {degree} (supported: {supported})")]
    UnsupportedDegree { degree: usize, supported: String },

    #[error("invalid problem data: {0}")]
    InvalidData(String),

    #[error("static condensation failed: singular local block on element {element}")]
    CondensationFailure { element: usize },

    #[error("singular system: no usable pivot at index {pivot}")]
    SingularSystem { pivot: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("meshes are not nested: {0}")]
    NonNested(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
