use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("gate acts on overlapping qubits")]
    OverlappingQubits,

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("post-selected outcome has probability {probability:e}")]
    ImpossibleOutcome { probability: f64 },

    #[error("degree-{degree} monomials unrealizable with one gate set: {reason}")]
    Unrealizable { degree: usize, reason: String },

    #[error("zero matrix has nothing to encode")]
    NothingToEncode,

    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("register width infeasible: {qubits} qubits needed for Nt = {nt}")]
    RegisterInfeasible { qubits: f64, nt: usize },

    #[error("amplitude {magnitude:e} leaked into padding slot {slot}")]
    SupportViolation { slot: usize, magnitude: f64 },

    #[error("semantic value has imaginary part {0:e}")]
    ImaginaryResidual(f64),

    #[error("zero state cannot be normalized")]
    ZeroState,

    #[error("empty Poincare section")]
    EmptySection,

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
