use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Shapes that cannot be combined (non-square input, mismatched sizes).
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("ambient dimension {dim} exceeds the configured cap {cap}")]
    Size { dim: usize, cap: usize },

    #[error("not simultaneously diagonalizable: {0}")]
    NotDiagonalizable(String),

    #[error("not a poset: {0}")]
    NotAPoset(String),

    #[error("not a scheme: axiom {axiom} ({name}) fails with residual {residual:e}")]
    NotAScheme {
        axiom: u8,
        name: &'static str,
        residual: f64,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl Error {
    /// Process exit code for the command-line front end.
    ///
    /// 0 ok, 1 verification failure, 2 parse/input, 3 resource, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotAScheme { .. } | Error::Verification(_) | Error::NotDiagonalizable(_) => 1,
            Error::Parse(_)
            | Error::Io(_)
            | Error::NotAPoset(_)
            | Error::Contract(_)
            | Error::Dimension(_) => 2,
            Error::Size { .. } | Error::Resource(_) => 3,
            Error::Numerical(_) => 4,
        }
    }
}
