use thiserror::Error;

/// Errors raised by the reservoir library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no inputs")]
    NoInputs,
    #[error("cannot normalize zero series")]
    ZeroSeries,
    #[error("empty mask")]
    EmptyMask,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("washout {washout} must be smaller than trajectory length {len}")]
    WashoutTooLong { washout: usize, len: usize },
    #[error("empty design matrix")]
    EmptyDesign,
    #[error("target has zero variance")]
    ZeroVariance,
    #[error("degenerate column norm (column {0})")]
    DegenerateColumn(usize),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("αL ≥ 1/√2: bound undefined (αL = {0})")]
    BoundUndefined(f64),
    #[error("zero denominator: inputs are identical")]
    ZeroDenominator,
    #[error("no admissible time steps")]
    NoAdmissibleSteps,
    #[error("empty class")]
    EmptyClass,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("NARMA diverged; reseed")]
    NarmaDiverged,
    #[error("i/o error: {0}")]
    Io(String),
    #[error("malformed data: {0}")]
    Format(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io(e.to_string()),
            _ => Error::Format(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
