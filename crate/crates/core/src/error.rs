use thiserror::Error;

/// Failures raised by the numerical routines.
///
/// Numeric payloads are stored as `f64` regardless of the scalar type in use.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("integration did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    NonConvergent { estimate: f64, tolerance: f64 },

    #[error("pointwise evaluation of a tempered measure needs a frequency cutoff")]
    TemperedWithoutCutoff,

    #[error("kernel is a tempered distribution; {0} requires a continuous kernel")]
    TemperedKernel(&'static str),

    #[error("matrix is not Hermitian (max |G - G*| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("quadrature grid too coarse: {coarse} vs refined {fine}")]
    GridTooCoarse { coarse: f64, fine: f64 },

    #[error("{0} is not differentiable")]
    NotDifferentiable(&'static str),

    #[error("elements belong to different kernels")]
    KernelMismatch,

    #[error("measure is not the Bochner partner of the kernel: {0}")]
    MeasureMismatch(String),

    #[error("series tail bound {bound:e} exceeds tolerance {tolerance:e}")]
    TailNotCertified { bound: f64, tolerance: f64 },

    #[error("product/word depth {required} exceeds the limit {limit}")]
    DepthInsufficient { required: usize, limit: usize },

    #[error("grid of {size} points exceeds the clique-search budget of {limit}")]
    GridTooLarge { size: usize, limit: usize },

    #[error("covariance factorization clipped {clipped:e} of trace {trace:e}")]
    FactorizationFailure { clipped: f64, trace: f64 },

    #[error("function is not positive definite (min spectral coefficient {min_coefficient:e})")]
    NotPositiveDefinite { min_coefficient: f64 },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown catalog name `{0}`")]
    UnknownName(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
