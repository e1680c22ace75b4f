use alloc::string::String;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("empty input")]
    Empty,

    #[error("negative weight at index {index}: {value}")]
    NegativeWeight { index: usize, value: f64 },

    #[error("non-finite entry at index {index}: {value}")]
    NonFinite { index: usize, value: f64 },

    #[error("all weights are zero")]
    AllZero,

    #[error("weights do not sum to 1 (sum = {0})")]
    NotNormalized(f64),

    #[error("invalid divergence family: {0}")]
    InvalidFamily(String),

    #[error("eta = {eta} outside (0, {cap})")]
    EtaOutOfRange { eta: f64, cap: f64 },

    #[error("lambda must be positive and finite, got {0}")]
    NonPositiveLambda(f64),

    #[error("objective is not smooth at this point; use the derivative-free path")]
    NonSmooth,

    #[error("conjugate argument at atom {0} lies outside the domain of f*")]
    OutsideDomain(usize),

    #[error("objective is +inf at every start point")]
    InfeasibleStart,

    #[error("unsupported atom count {0} for the grid oracle (need 2 or 3)")]
    UnsupportedSize(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("infeasible decision constraint: {0}")]
    InfeasibleConstraint(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
