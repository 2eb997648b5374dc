use thiserror::Error;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("operator is not Hermitian (‖M − M†‖ = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not unitary (‖U†U − 1‖ = {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit {qubit} out of range for a {nqubits}-qubit register")]
    QubitOutOfRange { qubit: usize, nqubits: usize },

    #[error("{what} = {value} is outside [{lo}, {hi}]")]
    OutOfRange { what: &'static str, value: f64, lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("measurement projected onto a zero-norm state")]
    ZeroNormProjection,

    #[error("measurement record does not match the qubits being reset")]
    StaleRecord,

    #[error("coupling {0} is not supported in circuit mode")]
    UnsupportedCoupling(String),

    #[error("circuit on {0} qubits is too large to densify")]
    TooLarge(usize),

    #[error("search space is empty: {0}")]
    EmptySearchSpace(String),

    #[error("no success within the step cap of {cap}")]
    Diverged { cap: usize },

    #[error("config error at `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config { field: field.into(), reason: reason.into() }
    }
}
