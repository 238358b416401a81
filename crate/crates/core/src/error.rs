use thiserror::Error;

/// Errors raised across the compiler, simulator and verification harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: expected {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid modulus {0}: must be at least 2")]
    InvalidModulus(String),

    #[error("invalid arity {0}")]
    InvalidArity(usize),

    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: String, right: String },

    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },

    #[error("invalid error rate {0}: must lie in (0, 1)")]
    InvalidEpsilon(f64),

    #[error("goodness is undefined for b = 0 mod m")]
    ZeroB,

    #[error("{what} exceeds the tractability limit {limit}")]
    TooLarge { what: String, limit: String },

    #[error("good-set size {0} is not a power of two")]
    NonPowerOfTwoT(usize),

    #[error("empty characteristic")]
    EmptyCharacteristic,

    #[error("invalid SOP formula: {0}")]
    InvalidFormula(String),

    #[error("invalid truth table length {0}: must be a power of two")]
    InvalidTruthTable(usize),

    #[error("invalid bit string: {0}")]
    InvalidBits(String),

    #[error("invalid program: {}", .0.join("; "))]
    InvalidProgram(Vec<String>),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("not a subgroup: {0}")]
    NotSubgroup(String),

    #[error("subgroup is not normal: {0}")]
    NotNormal(String),

    #[error("polynomial is not linear (monomial of degree {0})")]
    NonLinear(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
