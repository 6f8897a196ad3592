//! Numeric tolerances shared across the crate. Centralized so that validation,
//! projection, and the test suite all agree on the same constants.

/// Absolute entry-wise tolerance for Hermiticity checks.
pub const HERMITICITY: f64 = 1e-12;

/// Absolute tolerance for a density-matrix trace versus 1.
pub const TRACE: f64 = 1e-12;

/// Eigenvalues of a density matrix may undershoot zero by at most this much
/// (numerical slack) before the matrix is rejected as non-physical.
pub const PSD_SLACK: f64 = 1e-12;

/// Entry-wise change above which the physicality projection is reported as
/// having actually altered the state.
pub const PROJECTION_REPORT: f64 = 1e-12;

/// Normalized probabilities may leave [0, 1] by at most this much (counting
/// noise allowance) before a scan is rejected.
pub const PROBABILITY_SLACK: f64 = 0.05;

/// Diagonal populations handed to assembly must sum to 1 within this much;
/// they are renormalized otherwise.
pub const DIAGONAL_SUM: f64 = 1e-9;

/// Required relative agreement between the closed-form precession pattern and
/// direct numerical quadrature of the underlying time integral.
pub const QUADRATURE_REL: f64 = 1e-6;
