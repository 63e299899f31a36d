use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {got}: need at least {min}")]
    InvalidDimension { got: usize, min: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("truncation tail {tail:.3e} exceeds bound {bound:.3e}; need dim >= {required}")]
    Truncation {
        tail: f64,
        bound: f64,
        required: usize,
    },
    #[error("invalid oscillator: {0}")]
    InvalidSpec(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("brute-force ordering refused for m = {m}: guard is m <= {guard}")]
    Guard { m: u32, guard: u32 },
    #[error("unsupported case: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
