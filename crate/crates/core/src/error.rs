use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two objects that must share a dimension do not.
    DimensionMismatch { expected: usize, found: usize },
    /// The operator failed a positivity check (negative quadratic form or eigenvalue).
    NotPositiveDefinite,
    /// The spectral backend was requested for an operator without eigenstructure.
    MissingEigenstructure,
    /// A scalar argument is outside its admissible range.
    InvalidArgument { name: &'static str, value: f64 },
    /// An evaluation time lies outside the interval it was requested on.
    OutsideInterval { t: f64, left: f64, right: f64 },
    /// The adaptive controller shrank the step below its guard.
    StepUnderflow { t: f64, k: f64 },
    /// Too many consecutive rejections at one time level.
    TooManyRejections { t: f64, rejections: usize },
    /// A state or estimator became NaN or infinite.
    NonFinite { t: f64 },
    /// A matrix factorization met a zero pivot.
    Singular,
    /// Empty input where at least one entry is required.
    Empty(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotPositiveDefinite => write!(f, "operator is not positive definite"),
            Error::MissingEigenstructure => {
                write!(
                    f,
                    "spectral backend requires an operator with eigenstructure"
                )
            }
            Error::InvalidArgument { name, value } => {
                write!(f, "invalid value {value} for `{name}`")
            }
            Error::OutsideInterval { t, left, right } => {
                write!(f, "time {t} lies outside the interval [{left}, {right}]")
            }
            Error::StepUnderflow { t, k } => {
                write!(f, "step size underflow at t = {t} (k = {k:e})")
            }
            Error::TooManyRejections { t, rejections } => {
                write!(f, "{rejections} consecutive rejections at t = {t}")
            }
            Error::NonFinite { t } => write!(f, "non-finite value encountered at t = {t}"),
            Error::Singular => write!(f, "singular matrix in Pade solve"),
            Error::Empty(what) => write!(f, "{what}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
