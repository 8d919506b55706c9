//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors raised by statevector, Hamiltonian, ansatz, and engine operations.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("qubit index {index} out of range for {num_qubits}-qubit state")]
    TargetOutOfRange { index: usize, num_qubits: usize },

    #[error("parameterized gate has no angle: slot {slot} exceeds {provided} provided values")]
    MissingAngle { slot: usize, provided: usize },

    #[error("gate of kind {kind} requires an angle but none was given")]
    MissingFixedAngle { kind: &'static str },

    #[error("parameter count mismatch: circuit expects {expected}, got {got}")]
    ParamCountMismatch { expected: usize, got: usize },

    #[error("invalid parameter slots: {0}")]
    InvalidParameterSlots(String),

    #[error("statevector size mismatch: {left} vs {right} qubits")]
    SizeMismatch { left: usize, right: usize },

    #[error("register unitary mismatch: {0}")]
    RegisterMismatch(String),

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("dense realization of size {size} exceeds cap {cap}")]
    DenseCapExceeded { size: usize, cap: usize },

    #[error("parameter index {index} out of range ({num_params} parameters)")]
    ParamIndexOutOfRange { index: usize, num_params: usize },

    #[error("parameter slot {slot} is not a rotation gate")]
    NotARotationGate { slot: usize },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("wavepacket has vanishing norm on the grid")]
    ZeroNorm,

    #[error("shot count must be at least 1")]
    InvalidShotCount,

    #[error("ODE integration failed: {message} (last good time {t_reached})")]
    SolverFailure { message: String, t_reached: f64 },

    #[error("non-finite parameter velocity encountered at t = {t}")]
    NonFiniteVelocity { t: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed file: {0}")]
    MalformedFile(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
