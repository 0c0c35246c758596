use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension n = {n} out of range (supported: 0..={max})")]
    DimensionOutOfRange { n: usize, max: usize },

    #[error("level t = {t} out of range for n = {n}")]
    LevelOutOfRange { t: usize, n: usize },

    #[error("lattice vector is truncated at level {level}, level {needed} is required")]
    Truncated { level: usize, needed: usize },

    #[error("expected a {expected} vector, found {found}")]
    WrongRepresentation {
        expected: &'static str,
        found: &'static str,
    },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("subset {subset} is not contained in {{1..{n}}}")]
    SubsetOutOfRange { subset: String, n: usize },

    #[error("corner entries sum to {sum}, expected exactly 1")]
    Normalization { sum: String },

    #[error("constraint {index} is satisfied by every 0/1 point (redundant)")]
    RedundantConstraint { index: usize },

    #[error("instance has no linear constraints")]
    NoConstraints,

    #[error("objective is constant on {{0,1}}^n")]
    ConstantObjective,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("secular root did not converge after {iterations} iterations (bracket [{lo}, {hi}])")]
    NonConvergence { lo: f64, hi: f64, iterations: usize },

    #[error("dense eigensolver limited to dimension {max}, got {dim}")]
    DimensionOverflow { dim: usize, max: usize },
}
