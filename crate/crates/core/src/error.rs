use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error{}: {msg}", row.map(|r| format!(" at row {r}")).unwrap_or_default())]
    Csv { row: Option<usize>, msg: String },

    #[error("unparseable date {value:?} at row {row}")]
    BadDate { row: usize, value: String },

    #[error("duplicate period {period} at row {row}")]
    DuplicatePeriod { row: usize, period: String },

    #[error("series {0:?} not found")]
    UnknownSeries(String),

    #[error("duplicate series name {0:?}")]
    DuplicateSeries(String),

    #[error("series length {values} does not match index length {index}")]
    LengthMismatch { values: usize, index: usize },

    #[error("series {name:?} contains missing values")]
    MissingValues { name: String },

    #[error("no common complete span across series")]
    EmptyIntersection,

    #[error("need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArg(String),

    #[error("series {0:?} has zero variance")]
    ZeroVariance(String),

    #[error("design matrix is rank deficient; column {column:?} is linearly dependent")]
    RankDeficient { column: String },

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Coarse classification used by frontends to map errors to exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad request: unknown column, invalid parameter.
    Config,
    /// The input data cannot support the operation.
    Data,
    /// The computation itself broke down.
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            UnknownSeries(_) | InvalidArg(_) => ErrorClass::Config,
            Io(_) | Csv { .. } | BadDate { .. } | DuplicatePeriod { .. }
            | DuplicateSeries(_) | LengthMismatch { .. } | MissingValues { .. }
            | EmptyIntersection | TooShort { .. } => ErrorClass::Data,
            ZeroVariance(_) | RankDeficient { .. } | NotPositiveDefinite { .. }
            | Numerical(_) => ErrorClass::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
