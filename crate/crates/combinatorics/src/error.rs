use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CombinatoricsError {
    #[error("invalid collision map: {0}")]
    InvalidMap(String),

    #[error("enumeration cap exceeded: {count} maps for (k={k}, n={n}) over cap {cap}")]
    CapExceeded { k: usize, n: usize, count: u128, cap: u64 },

    #[error("illegal move at column {column}: {reason}")]
    IllegalMove { column: usize, reason: String },

    #[error("echelon reduction did not terminate within {0} moves")]
    ReductionStuck(usize),

    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
}
