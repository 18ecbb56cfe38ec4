use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("truncation order {requested} below the needed {needed}")]
    Truncation { requested: u32, needed: u32 },
    #[error("edge ({0}, {1}) is not in the edge set")]
    MissingEdge(u8, u8),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("incompatible surjections: {0}")]
    Incompatible(String),
    #[error("window too large: {size} exceeds the cap {cap}")]
    WindowTooLarge { size: usize, cap: usize },
    #[error("not closed: {0}")]
    NotClosed(String),
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
