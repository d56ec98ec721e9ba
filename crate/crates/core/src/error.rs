use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("register of {requested} qubits exceeds the configured cap of {cap}")]
    CapExceeded { requested: usize, cap: usize },

    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    IndexOutOfRange { index: usize, num_qubits: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid distribution: {0}")]
    BadDistribution(String),

    #[error("parameter too large: {0}")]
    ParamTooLarge(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("code search exhausted after {tries} tries (best delta {best_delta:.6})")]
    SearchExhausted { tries: usize, best_delta: f64 },

    #[error("tomography needs {shots} shots, above the ceiling of {ceiling}")]
    BudgetOverflow { shots: u128, ceiling: u128 },

    #[error("net of {size} elements exceeds the ceiling of {ceiling}; coarsen gamma")]
    NetTooLarge { size: u128, ceiling: u128 },

    #[error("adversary failed: {0}")]
    AdversaryFailure(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("plot error: {0}")]
    Plot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) => 2,
            Error::CapExceeded { .. } => 3,
            Error::Io(_) | Error::Plot(_) => 4,
            _ => 1,
        }
    }
}
