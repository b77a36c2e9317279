use thiserror::Error;

/// Failures raised by the library. Divergent norms are values (`f64::INFINITY`),
/// not errors; only genuinely invalid requests end up here.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("malformed element: {0}")]
    MalformedElement(String),

    #[error("element is not in the intersection X0 ∩ X1 (‖x‖₀ = {norm0}, ‖x‖₁ = {norm1})")]
    NotInIntersection { norm0: f64, norm1: f64 },

    #[error("integral diverges on segment ({lo}, {hi}]")]
    DivergentIntegral { lo: f64, hi: f64 },

    #[error("image contains a logarithmic term on segment ({lo}, {hi}] (exponent {exponent})")]
    LogarithmicTerm { lo: f64, hi: f64, exponent: f64 },

    #[error("kernel basis is linearly dependent (numerical rank {rank} < {dim})")]
    DependentKernel { rank: usize, dim: usize },

    #[error("factorization requires 1 <= q < inf")]
    InfiniteQ,

    #[error("models must share the same p (found {0} and {1})")]
    MismatchedP(f64, f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
