use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("subsystem {0} targeted more than once")]
    DuplicateTarget(usize),

    #[error("subsystem index {index} out of range for {count} subsystems")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("Kraus operators increase the trace (excess {0:.3e})")]
    TraceIncreasing(f64),

    #[error("basis is not orthonormal (max deviation {0:.3e})")]
    NotOrthonormal(f64),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("radius {r} m is not outside the Schwarzschild radius {rs} m")]
    Horizon { r: f64, rs: f64 },

    #[error("divergent threshold: {0}")]
    DivergentThreshold(String),

    #[error("invalid spacetime configuration: {0}")]
    InvalidConfig(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("strategy incomplete: no rule at event {event} for received messages {received:?}")]
    StrategyIncomplete { event: String, received: Vec<String> },

    #[error("unknown unitary label `{0}`")]
    UnknownUnitary(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("format error: {0}")]
    Format(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
