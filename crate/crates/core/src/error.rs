use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("result overflows the floating range: {0}")]
    Overflow(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid representation for this space: {0}")]
    InvalidRepresentation(String),

    #[error("invalid orbit space: {0}")]
    InvalidSpace(String),

    #[error("point {0:?} is not in the fundamental domain")]
    OutOfDomain(Vec<i64>),

    #[error("orbit sum did not converge within {max_shell} shells (last shell magnitude {last_shell_magnitude:e})")]
    NonConvergence {
        max_shell: u32,
        last_shell_magnitude: f64,
    },

    #[error("resolvent branch failure: {0}")]
    Branch(String),

    #[error("step count {0} exceeds the configured maximum")]
    StepOverflow(i64),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("eigensolver did not converge after {0} sweeps")]
    EigenConvergence(usize),

    #[error("invalid configuration: {0}")]
    Config(String),
}
