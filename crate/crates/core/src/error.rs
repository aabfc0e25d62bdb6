use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("requested {requested} qubits exceeds the qubit cap of {cap}")]
    QubitCap { requested: usize, cap: usize },

    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitIndex { index: usize, num_qubits: usize },

    #[error("qubit {0} appears more than once in a gate")]
    OverlappingQubits(usize),

    #[error("invalid register layout: {0}")]
    Layout(String),

    #[error("non-finite phase {value} at position {index}")]
    NonFinitePhase { index: usize, value: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("image has no pixels")]
    EmptyImage,

    #[error("invalid intensity {value} at pixel {index}: {reason}")]
    Intensity { index: usize, value: f64, reason: String },

    #[error("invalid intensity range {0}")]
    IntensityRange(f64),

    #[error("signal annihilated at pixel {pixel}: every bin fell below threshold {threshold:e}")]
    SignalAnnihilated { pixel: usize, threshold: f64 },

    #[error("invalid threshold: {0}")]
    Threshold(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
