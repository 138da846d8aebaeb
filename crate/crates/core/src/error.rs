use thiserror::Error;

/// Errors raised by evidence computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvidenceError {
    #[error("invalid observation: n = {n}, x = {x} (need n > 0 and 0 <= x <= n)")]
    InvalidObservation { n: f64, x: f64 },

    #[error("invalid hypothesis contrast: {0}")]
    InvalidContrast(String),

    #[error("operation requires a nested (Class II) contrast")]
    InvalidClass,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("quadrature did not converge: estimated error {error:e} exceeds {tolerance:e} after {subdivisions} subdivisions")]
    NonConvergence {
        error: f64,
        tolerance: f64,
        subdivisions: usize,
    },

    #[error("non-positive denominator V - b = {0:e}")]
    NonPositiveDenominator(f64),

    #[error("no interior minimum of E in x/n found at n = {n}")]
    DegenerateMinimum { n: f64 },

    #[error("target E = {target} not bracketable in n on [{n_min}, {n_max}]")]
    NotBracketable { target: f64, n_min: f64, n_max: f64 },

    #[error("oracle input out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, EvidenceError>;
