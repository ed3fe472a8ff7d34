//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A path violates a structural invariant (empty knots, unsorted times, ...).
    #[error("malformed path: {0}")]
    MalformedPath(String),

    /// A numeric parameter is outside its admissible domain.
    #[error("parameter domain: {0}")]
    ParameterDomain(String),

    /// Dimensions or horizons of two objects do not match.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Derivative or partition order beyond the supported range.
    #[error("unsupported order {0} (max {1})")]
    UnsupportedOrder(usize, usize),

    /// A tail envelope does not converge for the given exponents.
    #[error("divergent envelope: {0}")]
    DivergentEnvelope(String),

    /// The chaining constant series diverges for the supplied dyadic weight.
    #[error("divergent constant: {0}")]
    DivergentConstant(String),

    /// Mixing rate too slow relative to the moment order.
    #[error("invalid mixing rate: {0}")]
    InvalidMixingRate(String),

    /// Moment order below the supported threshold.
    #[error("unsupported moment order p = {0} (require p >= 3)")]
    UnsupportedMoment(f64),

    /// A boundary constant is required but neither derivable nor supplied.
    #[error("missing constant: {0}")]
    MissingConstant(String),

    /// An input required by the requested bound is absent.
    #[error("missing input: {0}")]
    MissingInput(String),

    /// Too few data points for an empirical estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The optimizer search box contains no feasible point.
    #[error("infeasible search: {0}")]
    Infeasible(String),

    /// Experiment configuration is invalid.
    #[error("config error: {0}")]
    Config(String),

    /// Filesystem error while reading or writing artifacts.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization error.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
