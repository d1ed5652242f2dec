//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by validation and numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The support/mean configuration is inconsistent (need a <= mu <= b, a < b).
    #[error("bad range: need a <= mu <= b with a < b (a={a}, mu={mu}, b={b})")]
    BadRange { a: f64, mu: f64, b: f64 },

    /// The MAD exceeds its feasibility cap 2(b-mu)(mu-a)/(b-a).
    #[error("infeasible MAD: d={d} outside [0, {cap}]")]
    InfeasibleMad { d: f64, cap: f64 },

    /// beta lies outside [d/(2(b-mu)), 1 - d/(2(mu-a))].
    #[error("infeasible beta: beta={beta} outside [{lo}, {hi}]")]
    InfeasibleBeta { beta: f64, lo: f64, hi: f64 },

    /// The variance is not attainable on the given range.
    #[error("infeasible variance: sigma^2={var} exceeds (b-mu)(mu-a)={cap}")]
    InfeasibleVariance { var: f64, cap: f64 },

    /// A named-family or rule parameter is out of its domain.
    #[error("bad parameter: {0}")]
    BadParameter(String),

    /// Transient horizon exceeds the configured cap.
    #[error("horizon too large: n={n} exceeds cap {cap}")]
    HorizonTooLarge { n: usize, cap: usize },

    /// The walk has nonnegative drift, so steady-state quantities diverge.
    #[error("no positive drift: E[X]={mean} >= 0")]
    NoPositiveDrift { mean: f64 },

    /// The queue is unstable (rho >= 1).
    #[error("unstable queue: rho={rho} >= 1")]
    Unstable { rho: f64 },

    /// Contour quadrature could not meet tolerances within max_height.
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    /// Support is not an integer multiple of |mu|.
    #[error("support not commensurate with |mu|: {0}")]
    NotCommensurate(String),

    /// Unit-disk root count disagrees with the expected s-1.
    #[error("root count mismatch: expected {expected} roots in |z|<1, found {found}")]
    RootCountMismatch { expected: usize, found: usize },

    /// Sample-based estimators need at least two observations.
    #[error("too few samples: n={0}, need at least 2")]
    TooFewSamples(usize),

    /// File ingestion failed (I/O or parse).
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
