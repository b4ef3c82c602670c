use thiserror::Error;

use crate::arith::CurveLabel;

#[derive(Debug, Error)]
pub enum Error {
    #[error("window of {entries} entries needs {bytes} bytes, over the {budget} byte budget")]
    Capacity {
        entries: u64,
        bytes: u64,
        budget: u64,
    },
    #[error("coefficient table for limit {limit} exceeds the memory budget; enable windowed mode")]
    Memory { limit: u64 },
    #[error("accumulator overflow: {0}")]
    Overflow(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("unknown variant {variant} for curve {curve}")]
    UnknownVariant { curve: CurveLabel, variant: u8 },
    #[error("d = {d} does not satisfy the eligibility condition of curve {curve}")]
    NotEligible { curve: CurveLabel, d: u64 },
    #[error("singular model: {0}")]
    Singular(String),
    #[error("non-integral quotient: {0}")]
    NonIntegral(String),
    #[error("L(E,1) vanishes numerically: |L| = {value:e} below threshold {threshold:e}")]
    VanishingL { value: f64, threshold: f64 },
    #[error("certification failed: raw quotient {raw} is not within 0.01 of a perfect square")]
    Certification { raw: f64 },
    #[error("precision of {digits} digits is unreachable")]
    Precision { digits: u32 },
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("cross-check mismatch at d = {d}: closed form {closed}, analytic {analytic}")]
    CrossCheck { d: u64, closed: u64, analytic: u64 },
    #[error("local solvability undecided at p = {p} within depth {depth}")]
    Undecided { p: u64, depth: u32 },
    #[error("empty series")]
    Empty,
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
