use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("not prime")]
    NotPrime,

    #[error("p must exceed 12")]
    PrimeTooSmall,

    #[error("p must be at least 2")]
    ParamTooSmall,

    #[error("{name} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: String,
        min: String,
        max: String,
    },

    #[error("degenerate triangle: {0}")]
    Degenerate(String),

    #[error("inadmissible configuration: {0}")]
    Inadmissible(String),

    #[error("nonconforming geometry: {0}")]
    Nonconforming(String),

    #[error("mismatched parameters: {0}")]
    Mismatch(String),

    #[error("refinement depth cap {0} reached")]
    DepthCap(usize),

    #[error("no admissible lattice point near {0}")]
    SnapFailed(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A property the construction guarantees did not hold.
    #[error("invariant breach: {0}")]
    InvariantBreach(String),
}

impl Error {
    pub(crate) fn out_of_range(
        name: &'static str,
        value: impl ToString,
        min: impl ToString,
        max: impl ToString,
    ) -> Self {
        Error::OutOfRange {
            name,
            value: value.to_string(),
            min: min.to_string(),
            max: max.to_string(),
        }
    }
}
