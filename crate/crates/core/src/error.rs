use thiserror::Error;

use crate::metric::Signature;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A state or interval outside the domain of the equation of state.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// `(dp/dv)_T >= 0` somewhere in `[lo, hi]` on the isotherm `temperature`.
    #[error("mechanical stability violated at T = {temperature} in v-interval [{lo}, {hi}]")]
    Stability { temperature: f64, lo: f64, hi: f64 },

    #[error("degenerate metric: {0}")]
    Degenerate(String),

    #[error("operation requires a lorentzian metric, found {0}")]
    Signature(Signature),

    #[error("vector is null under the metric (q = {q:e})")]
    NullVector { q: f64 },

    #[error("zero tangent vector")]
    ZeroVector,

    #[error("no closed form for virial order {order}; use quadrature")]
    UnsupportedOrder { order: usize },

    #[error("closed form not valid here ({0}); use quadrature")]
    ClosedFormDomain(String),

    #[error("quadrature did not converge: value {value:e}, error estimate {err_estimate:e} > tolerance {tolerance:e}")]
    NonConvergence { value: f64, err_estimate: f64, tolerance: f64 },
}
