use thiserror::Error;

/// Errors raised by table, group and analysis operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix has nonzero row or column sums mod {q}; not an element of the group")]
    NotInGroup { q: u32 },

    #[error("start table does not satisfy the configured row/column sums")]
    InvalidStart,

    #[error(
        "instance too large for exact enumeration: group size {required} exceeds cap {cap} \
         (raise max_group_size to at least {required})"
    )]
    CapExceeded { required: u128, cap: u128 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
