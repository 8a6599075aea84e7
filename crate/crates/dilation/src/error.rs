use thiserror::Error;

/// Errors produced by the library.
///
/// `Config` covers anything a user can fix by editing the run configuration
/// or the command line; everything else is a numeric or environment failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("k = {k} out of range (valid range is 1..={max})")]
    KOutOfRange { k: usize, max: usize },

    #[error("matrix dimension {d} exceeds the minor-oracle limit of {limit}")]
    MinorDimension { d: usize, limit: usize },

    #[error("degenerate disk: every quadrature node is rank-deficient")]
    DegenerateDisk,

    #[error("unknown system id `{0}`")]
    UnknownSystem(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Tag an error with the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Process exit code contract: 2 for usage errors, 3 for numeric/stage
    /// failures. Exit codes 0 and 1 are reserved for verdict outcomes.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::UnknownSystem(_) => 2,
            Error::Stage { source, .. } => source.exit_code().max(3),
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
