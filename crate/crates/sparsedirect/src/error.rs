use std::fmt;

/// Errors reported by the factorization, ordering and update routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Row/column counts do not agree with the operation's requirements.
    DimensionMismatch { expected: usize, found: usize },
    /// An index fell outside 1..=bound.
    IndexOutOfRange { index: usize, bound: usize },
    /// No admissible pivot at the given elimination stage.
    Singular { stage: usize },
    /// Structural singularity: a Hall violator S on the row side with
    /// #Γ(S) = #S - 1.
    StructurallySingular { violator: Vec<usize> },
    /// Every pivot candidate was vetoed by the multmax/pivomin thresholds.
    AllPivotsVetoed { stage: usize },
    /// A symmetric matrix was not positive definite; `index` is the failing
    /// pivot column.
    NotPositiveDefinite { index: usize },
    /// A pattern passed to a symmetric-only routine is not symmetric.
    AsymmetricPattern,
    /// The modification series does not converge for the given step.
    SeriesDiverges { norm: f64 },
    /// Sherman-Morrison style denominator too close to zero.
    SingularUpdate,
    /// Exponent exceeded the system's emax.
    Overflow { exponent: i32 },
    /// A row or column carries no nonzero entry where one is required.
    EmptyLine { row: bool, index: usize },
    /// Malformed Matrix Market input.
    BadMatrixMarket(String),
    /// Underlying I/O failure.
    Io(String),
    /// Invalid argument combination described by the message.
    Invalid(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::IndexOutOfRange { index, bound } => {
                write!(f, "index {index} out of range 1..={bound}")
            }
            Error::Singular { stage } => {
                write!(f, "matrix singular to working tolerance at stage {stage}")
            }
            Error::StructurallySingular { violator } => {
                write!(f, "structurally singular; Hall violator rows {violator:?}")
            }
            Error::AllPivotsVetoed { stage } => {
                write!(f, "all pivot candidates vetoed at stage {stage}")
            }
            Error::NotPositiveDefinite { index } => {
                write!(f, "matrix not positive definite at pivot {index}")
            }
            Error::AsymmetricPattern => write!(f, "pattern is not symmetric"),
            Error::SeriesDiverges { norm } => {
                write!(f, "modification series diverges: ||alpha V dA|| = {norm}")
            }
            Error::SingularUpdate => write!(f, "update would make the basis singular"),
            Error::Overflow { exponent } => write!(f, "floating-point overflow: exponent {exponent}"),
            Error::EmptyLine { row, index } => {
                let kind = if *row { "row" } else { "column" };
                write!(f, "{kind} {index} has no nonzero entry")
            }
            Error::BadMatrixMarket(msg) => write!(f, "bad Matrix Market data: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
            Error::Invalid(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
