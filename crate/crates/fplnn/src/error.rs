/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Error type for fixed-point computations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input vector or region does not match the expected dimension.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    /// An iterate became non-finite or exceeded the magnitude guard.
    #[error("iteration diverged at step {step}")]
    Diverged { step: usize },
    /// A requested grid would need more evaluations than the guard allows.
    #[error("grid needs {points:.3e} evaluations, above the {limit:.0e} guard")]
    GridTooLarge { points: f64, limit: f64 },
    /// A contraction constant outside [0, 1) was supplied where the Banach
    /// bounds require K < 1.
    #[error("contraction constant K = {k} must lie in [0, 1)")]
    ContractionOutOfRange { k: f64 },
    /// The robust error bounds are derived under the hypothesis K in
    /// [0, 0.95]; the constant 20 in the cumulative bound 20/m is 1/(1-0.95).
    #[error("K = {k} violates the robust-iteration hypothesis K in [0, 0.95]")]
    RobustKOutOfRange { k: f64 },
    /// Too few usable steps for a statistic over the trace tail.
    #[error("trace too short: need at least {needed} usable steps")]
    InsufficientData { needed: usize },
    /// A fixed-point candidate did not refine below the validity threshold.
    #[error("candidate {index} failed to refine: residual {residual:.3e} above {limit:.3e}")]
    RefinementFailed { index: usize, residual: f64, limit: f64 },
    /// The quadratic impossibility property needs two distinct real fixed
    /// points, i.e. a strictly positive discriminant (b-1)^2 - 4ac.
    #[error("discriminant {disc} is not strictly positive")]
    NonPositiveDiscriminant { disc: f64 },
    /// Catch-all for precondition violations on operation arguments.
    #[error("invalid parameter: {msg}")]
    InvalidParameter { msg: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter { msg: msg.into() }
    }
}
