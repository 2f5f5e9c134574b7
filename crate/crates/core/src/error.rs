use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree {0} is not supported (expected 1, 2, 3 or 4)")]
    BadDegree(u8),
    #[error("class length {got} does not match lattice rank {expected}")]
    RankMismatch { expected: usize, got: usize },
    #[error("permutation {0} is not an element of the ambient group")]
    NotInGroup(String),
    #[error("group of order {order} exceeds the cap {cap}")]
    Oversize { order: u64, cap: u64 },
    #[error("malformed permutation: {0}")]
    BadPerm(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("schema error at {path}: {msg}")]
    Schema { path: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
