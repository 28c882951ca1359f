use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed PGM header: {0}")]
    PgmHeader(String),
    #[error("truncated PGM payload: expected {expected} pixels, found {found}")]
    PgmTruncated { expected: usize, found: usize },
    #[error("PGM maxval {0} exceeds 255")]
    PgmMaxval(u32),
    #[error("unsupported PGM magic {0:?}")]
    PgmMagic(String),

    #[error("field of {width}x{height} is below the 3x3 minimum")]
    FieldTooSmall { width: usize, height: usize },
    #[error("field data has {found} values, expected {expected}")]
    FieldLength { expected: usize, found: usize },
    #[error("non-finite value at cell ({x}, {y})")]
    NonFinite { x: usize, y: usize },
    #[error("dimension mismatch: {0:?} vs {1:?}")]
    DimensionMismatch((usize, usize), (usize, usize)),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("zero level set is empty; the contour vanished")]
    ContourVanished,
    #[error(
        "contour grew to {0} vertices, more than the raster has cells; it is folding over itself"
    )]
    ContourRunaway(usize),
    #[error("zero level set forms an open chain (interface touches the grid border)")]
    OpenChain,

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Returns `InvalidParameter` with `msg` unless `ok`.
pub(crate) fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}
