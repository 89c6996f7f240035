//! Error type shared across the crate.

/// Everything that can go wrong when validating parameters, evaluating
/// MGFs outside their domain, or running estimators.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A rate parameter was zero, negative, NaN or infinite.
    #[error("{name} must be a positive finite rate, got {value}")]
    InvalidRate { name: &'static str, value: f64 },

    /// A (lambda, mu) pair violates the stability condition lambda < mu.
    #[error("{role} parameters unstable: lambda = {lambda} must be < mu = {mu}")]
    Unstable {
        role: &'static str,
        lambda: f64,
        mu: f64,
    },

    /// alpha lies outside the hitting-time MGF domain (-inf, alpha_max].
    #[error("alpha = {alpha} outside the MGF domain: requires alpha <= {alpha_max}")]
    AlphaOutOfDomain { alpha: f64, alpha_max: f64 },

    /// The geometric mixture of Eq-style stationary MGFs diverges:
    /// (lambda_m / mu) * G(1, lambda, alpha) >= 1.
    #[error("stationary MGF series diverges: (lambda_m/mu) * G = {product} >= 1")]
    SeriesDiverges { product: f64 },

    /// An operation was called outside the parameter region it covers.
    #[error("{op}: {requirement}")]
    NotApplicable {
        op: &'static str,
        requirement: &'static str,
    },

    /// Case-2 epsilon margin must lie strictly inside (0, boundary rate).
    #[error("epsilon margin {margin} must lie in (0, {boundary})")]
    BadMargin { margin: f64, boundary: f64 },

    /// Monte Carlo MGF estimation refused too close to the domain boundary,
    /// where the estimator variance is unbounded.
    #[error(
        "alpha = {alpha} too close to the MGF domain boundary {boundary} \
         (estimator cap {cap}); the estimator variance is unbounded there"
    )]
    AlphaNearBoundary { alpha: f64, boundary: f64, cap: f64 },

    /// Too few replicas for a meaningful standard error.
    #[error("at least {min} replicas required, got {got}")]
    TooFewReplicas { got: u64, min: u64 },

    /// Hard event cap tripped while waiting for a hitting time.
    #[error("event cap of {cap} events exceeded (lambda = {lambda}, mu = {mu})")]
    EventCapExceeded { cap: u64, lambda: f64, mu: f64 },

    /// Bad CLI input (time grids, formats, missing flags).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// I/O failure while writing output.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
