use thiserror::Error;

/// Errors raised by the bound evaluators, samplers and decoders.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A factor diagonal fell below the relative singularity threshold.
    #[error("singular Gram matrix: factor diagonal {pivot} has relative magnitude {ratio:e}")]
    SingularGram { pivot: usize, ratio: f64 },

    /// C(p, k) exceeds the enumeration guard; use a sampled estimator instead.
    #[error("too many supports: C({p}, {k}) = {count} exceeds the enumeration limit {limit}")]
    TooManySupports { p: usize, k: usize, count: String, limit: u64 },

    #[error("rank {index} out of range for C({p}, {k}) = {count}")]
    RankOutOfRange { index: u128, p: usize, k: usize, count: String },

    #[error("refusing to allocate a {rows}x{cols} matrix (limit {limit} entries)")]
    AllocationGuard { rows: usize, cols: usize, limit: u64 },

    #[error("quadrature did not reach tolerance {tolerance:e} within {max_subdivisions} subdivisions")]
    QuadratureNonConvergence { tolerance: f64, max_subdivisions: usize },

    /// No support explains the observation within tolerance.
    #[error("no candidate support within relative residual {tol:e}")]
    NoCandidate { tol: f64 },

    /// At least two supports explain the observation within tolerance.
    #[error("ambiguous decode: {candidates} supports within relative residual {tol:e}")]
    AmbiguousDecode { candidates: usize, tol: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
