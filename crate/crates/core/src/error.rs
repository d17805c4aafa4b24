use thiserror::Error;

/// Errors raised by the shiftlab kernels, checkers and constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("projection radius {m} exceeds window half-width {m_max}")]
    WindowOverflow { m: usize, m_max: usize },

    #[error("window mismatch: {left} vs {right}")]
    WindowMismatch { left: usize, right: usize },

    #[error("operator is numerically singular (sigma_min = {sigma_min:e})")]
    Singular { sigma_min: f64 },

    #[error("operator is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("weight W_{j}: {what} = {value} exceeds declared bound {bound}")]
    WeightBound {
        j: i64,
        what: &'static str,
        value: f64,
        bound: f64,
    },

    #[error("index {index} outside range [{lo}, {hi}]")]
    IndexOutOfRange { index: i64, lo: i64, hi: i64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("approximant provider failed: {0}")]
    Provider(String),

    #[error("horizon exceeded: {requested} steps requested, horizon is {horizon}")]
    HorizonExceeded { requested: usize, horizon: usize },

    #[error("construction failed: {reason} (partial sums: forward {forward:e}, inverse {inverse:e})")]
    ConstructionFailed {
        reason: String,
        forward: f64,
        inverse: f64,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
