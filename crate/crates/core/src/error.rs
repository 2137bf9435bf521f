use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Variants are grouped into the classes the command-line tool maps to exit
/// codes (see [`Error::class`]).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {}x{} vs {}x{}", .left.0, .left.1, .right.0, .right.1)]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("length mismatch for {what}: expected {expected}, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyDimension { rows: usize, cols: usize },

    #[error("non-finite value {value} at ({row}, {col})")]
    NonFinite { row: usize, col: usize, value: f64 },

    #[error("invalid `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("SVD did not converge for a {rows}x{cols} matrix")]
    SvdNoConvergence { rows: usize, cols: usize },

    #[error("iteration {iteration}: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: bad magic {found:02x?}, expected \"RDM1\"", .path.display())]
    BadMagic { path: PathBuf, found: Vec<u8> },

    #[error("{}: expected {expected} bytes for the declared header, found {actual}", .path.display())]
    BadLength { path: PathBuf, expected: u64, actual: u64 },

    #[error("{}: header declares {rows}x{cols}; both dimensions must be at least 1", .path.display())]
    BadHeader { path: PathBuf, rows: u32, cols: u32 },

    #[error("{}: line {line}, column {column}: non-numeric cell {cell:?}", .path.display())]
    CsvCell {
        path: PathBuf,
        line: u64,
        column: usize,
        cell: String,
    },

    #[error("{}: {reason}", .path.display())]
    CsvLayout { path: PathBuf, reason: String },

    #[error("{}: {reason}", .path.display())]
    Config { path: PathBuf, reason: String },
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Io,
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::ShapeMismatch { .. }
            | Error::LengthMismatch { .. }
            | Error::EmptyDimension { .. }
            | Error::NonFinite { .. }
            | Error::InvalidParameter { .. }
            | Error::Config { .. } => ErrorClass::Validation,
            Error::SvdNoConvergence { .. } => ErrorClass::Numerical,
            Error::AtIteration { source, .. } => source.class(),
            Error::Io { .. }
            | Error::BadMagic { .. }
            | Error::BadLength { .. }
            | Error::BadHeader { .. }
            | Error::CsvCell { .. }
            | Error::CsvLayout { .. } => ErrorClass::Io,
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
