use thiserror::Error;

/// Errors raised by the analysis library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid physical system: {0}")]
    InvalidSystem(String),

    #[error("invalid dimension {0}: expected 1, 2 or 3")]
    InvalidDimension(f64),

    #[error("coupling must be finite, got {0}")]
    NonFiniteCoupling(f64),

    #[error("physical coupling is only defined in three dimensions (requested d = {0})")]
    PhysicalCouplingRequires3d(u8),

    #[error("no maximum atom number exists for scattering length {0} m (needs a_s < 0)")]
    NotAttractive(f64),

    #[error("critical coupling must be negative, got {0}")]
    NonNegativeCritical(f64),

    #[error("width must be positive, got {0}")]
    NonPositiveWidth(f64),

    #[error("invalid scan window [{lo}, {hi}] with {points} points")]
    InvalidScan { lo: f64, hi: f64, points: usize },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("initial state does not match the solver grid")]
    GridMismatch,

    #[error("relaxation did not converge after {iterations} iterations (last energy {energy})")]
    NonConverged { iterations: usize, energy: f64 },

    #[error("no collapse threshold exists in {0} dimension(s)")]
    NoThreshold(u8),

    #[error("bracket [{g_lo}, {g_hi}] does not straddle the collapse transition: {reason}")]
    InvalidBracket { g_lo: f64, g_hi: f64, reason: String },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("failed to build thread pool: {0}")]
    ThreadPool(String),
}

pub type Result<T> = std::result::Result<T, Error>;
