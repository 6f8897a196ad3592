//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong when building states, scans, or fits.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An angle lies outside its documented range.
    #[error("{name} = {value} is outside {range}")]
    AngleOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    /// A matrix expected to be Hermitian is not, within tolerance.
    #[error("matrix deviates from Hermitian symmetry by {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    /// A density-matrix trace differs from one beyond tolerance, or is unusable.
    #[error("trace {trace} is not acceptable for a density matrix")]
    InvalidTrace { trace: f64 },

    /// A density matrix has a negative eigenvalue beyond tolerance.
    #[error("matrix has negative eigenvalue {eigenvalue:.3e}")]
    NotPositiveSemidefinite { eigenvalue: f64 },

    /// A physical or configuration parameter violates its documented domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A scan fails a structural requirement (ordering, length, signs, range).
    #[error("invalid scan: {0}")]
    Scan(String),

    /// A calibration input cannot be used for normalization or retrieval.
    #[error("calibration unusable: {0}")]
    Calibration(String),

    /// A least-squares problem is rank deficient or otherwise unsolvable.
    #[error("fit failed: {0}")]
    Fit(String),
}
