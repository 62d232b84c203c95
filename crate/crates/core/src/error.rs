use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mode parameters: {0}")]
    InvalidParams(String),

    #[error("scale factor undefined at y = {y} (x = {x})")]
    Domain { y: f64, x: f64 },

    #[error("ODE integration failed: {0}")]
    Integration(String),

    #[error("Bogoliubov extraction drifted: |beta|^2 = {first} at y1, {second} at y2")]
    ExtractionMismatch { first: f64, second: f64 },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("CNOT control and target are both qubit {0}")]
    SameControlTarget(usize),

    #[error("{n_qubits} qubits exceeds the limit of {max}")]
    TooManyQubits { n_qubits: usize, max: usize },

    #[error("the all-identity Pauli string only contributes a global phase")]
    IdentityRotation,

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid noise model: {0}")]
    InvalidNoiseModel(String),

    #[error("restricted confusion matrix is singular; collect more shots or a fuller support")]
    SingularConfusion,

    #[error("invalid extrapolation input: {0}")]
    InvalidExtrapolation(String),

    #[error("circuit parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
