use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("point {0} is not in the universe of {1}")]
    UnknownPoint(String, String),
    #[error("invalid scale: {0}")]
    InvalidScale(String),
    #[error("constant-subsequence candidate: value {value} occurs {count} times within horizon {horizon}")]
    ConstantSubsequence { value: String, count: usize, horizon: usize },
    #[error("delta-search failed: no 2^-k (k <= 40) satisfies T(1-d, 1-d) > 1 - {epsilon}")]
    DeltaSearchFailed { epsilon: String },
    #[error("density exhausted at n = {index}: no dense point found within radius {radius}")]
    DensityExhausted { index: usize, radius: String },
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("unknown {kind} {name:?}; valid: {}", valid.join(", "))]
    UnknownName { kind: &'static str, name: String, valid: Vec<String> },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
