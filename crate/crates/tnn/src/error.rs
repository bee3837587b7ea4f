use thiserror::Error;

/// Errors raised by encoding, simulation and training operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("negative input value {0} (inputs must be >= 0)")]
    NegativeInput(f64),

    #[error("non-finite input value")]
    NonFiniteInput,

    #[error("empty input sequence")]
    EmptyInput,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("spike time {time} outside encoding window {window}")]
    TimeOutsideWindow { time: u32, window: u32 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("weight value {0} is not representable in 8-bit fixed point")]
    UnrepresentableWeight(f64),
}
