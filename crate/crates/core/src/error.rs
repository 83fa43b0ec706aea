use thiserror::Error;

/// Errors raised anywhere in the pipeline.
///
/// Every variant falls into one of three [`ErrorKind`]s, which the CLI maps
/// onto its exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid field modulus: {0}")]
    InvalidModulus(String),
    #[error("field of order {p}^{r} exceeds the supported table size")]
    FieldTooLarge { p: u32, r: u32 },
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("inseparable curve: {0}")]
    Inseparable(String),
    #[error("defining polynomial is reducible: found factor {0}")]
    Reducible(String),
    #[error("singular change-of-basis system (is the curve separable in T?)")]
    SingularBasis,
    #[error("digit {digit} out of range for base {base}")]
    DigitOutOfRange { digit: usize, base: usize },
    #[error("{0} is not a root of f(0, T)")]
    NotARoot(String),
    #[error("ramified branch at x = 0 (f_T(0, {0}) = 0); supply the branch coefficients directly")]
    RamifiedBranch(String),
    #[error("element has a pole at x = 0 along the chosen branch")]
    PoleAtOrigin,
    #[error("insufficient precision: have {have}, need {need}")]
    Precision { have: usize, need: usize },
    #[error("state limit of {0} exceeded")]
    StateLimit(usize),
    #[error("no annihilating relation with deg_T <= {deg_t} and deg_x <= {deg_x}")]
    NoRelation { deg_t: usize, deg_x: usize },
    #[error("syntax error at offset {offset}: {msg}")]
    Parse { offset: usize, msg: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Coarse classification of [`Error`], used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or mathematically invalid input.
    User,
    /// The computation was refused: a cap, limit or precision bound was hit.
    Refusal,
    /// A checked invariant failed. Always a bug.
    Internal,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Precision { .. } | Error::StateLimit(_) | Error::NoRelation { .. } => {
                ErrorKind::Refusal
            }
            Error::FieldTooLarge { .. } => ErrorKind::Refusal,
            Error::Internal(_) => ErrorKind::Internal,
            _ => ErrorKind::User,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
