use thiserror::Error;

/// Errors produced by the analysis and serialization layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: side must be at least 2, got {0}")]
    InvalidGrid(usize),

    #[error("grid mismatch: side {0} vs side {1}")]
    GridMismatch(usize, usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("grid side must be odd for Weyl-family operations, got {0}")]
    EvenGrid(usize),

    #[error("operator window is zero")]
    DegenerateWindow,

    #[error("weight must be strictly positive everywhere")]
    NonPositiveWeight,

    #[error("weight is not symmetric under negation (max relative deviation {0:.3e})")]
    AsymmetricWeight(f64),

    #[error("exponent must be at least 1 or infinity, got {0}")]
    InvalidExponent(f64),

    #[error("operator is not Hermitian (relative deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:.3e} of scale {1:.3e})")]
    NotPositive(f64, f64),

    #[error("window list holds {requested} windows but the grid has capacity {capacity}")]
    WindowCapacity { requested: usize, capacity: usize },

    #[error("window list is empty")]
    EmptyWindows,

    #[error("invalid spec '{spec}': {reason}")]
    BadSpec { spec: String, reason: String },

    #[error("malformed array file: {0}")]
    BadFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn bad_spec(spec: &str, reason: impl Into<String>) -> Self {
        Error::BadSpec {
            spec: spec.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
