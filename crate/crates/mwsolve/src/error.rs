use std::fmt;

/// Error type shared by every module of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a documented precondition.
    Domain(String),
    /// A textual expression or number failed to parse; `pos` is the byte
    /// offset of the first offending character.
    Parse { msg: String, pos: usize },
    /// A configurable cap (interval count, factorization budget, ...) was hit.
    Resource(String),
    /// The requested operation needs the enclosure path (for example an exact
    /// evaluation of a measure with a density part).
    Mode(String),
    /// A moment sequence is not realized by any measure of the requested shape.
    NotAtomic(String),
    /// Wrapped I/O failure from table or report writers.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Parse { msg, pos } => write!(f, "parse error at byte {pos}: {msg}"),
            Error::Resource(msg) => write!(f, "resource cap exceeded: {msg}"),
            Error::Mode(msg) => write!(f, "mode error: {msg}"),
            Error::NotAtomic(msg) => write!(f, "not atomic: {msg}"),
            Error::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
