use thiserror::Error;

/// Errors shared across the solver toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A squared effective frequency came out non-positive, so the
    /// localized (oscillatory) solution family does not exist for these
    /// parameters.
    #[error("non-oscillatory regime: {symbol}^2 = {radicand} <= 0")]
    NonOscillatoryRegime { symbol: &'static str, radicand: f64 },

    /// Wavefunction mass at the grid edges is above the tail threshold;
    /// the grid is too small for the requested state.
    #[error("edge leak: relative tail magnitude {tail:.3e} exceeds {threshold:.3e}")]
    EdgeLeak { tail: f64, threshold: f64 },

    /// Quantum number too large for a numerically safe Hermite recurrence.
    #[error("overflow risk: nu = {nu} exceeds supported maximum {max}")]
    OverflowRisk { nu: usize, max: usize },

    /// The 3x3 system tying second-moment constants to initial covariances
    /// is singular (only possible at Omega = 0, which the regime check
    /// already excludes).
    #[error("singular fit: second-moment constant system has no unique solution")]
    SingularFit,

    /// Norm drift during split-step evolution exceeded the abort threshold.
    #[error("unstable evolution: relative norm drift {drift:.3e} exceeds {limit:.3e}")]
    Unstable { drift: f64, limit: f64 },

    /// A structurally invalid grid (sample count not a power of two, bad step).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A structurally invalid evolution configuration.
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
