//! Inverse problem: turn polarization-resolved PL scans back into a density
//! matrix — scan normalization, diagonal retrieval from circular polarization,
//! trigonometric least squares for the coherences, and projection onto the
//! physical state space.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::plmodel::PLScan;
use crate::qstate::{fidelity, pure_state, DensityMatrix, PureStateAngles};
use crate::tol;

/// A PL scan mapped to the probability scale: angles (radians) with values
/// approximating the projection probability p(α), plus the reference extrema
/// (low, high) that defined the map. Values are kept unclamped so fits stay
/// unbiased; clamping to [0, 1] is a reporting concern.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedScan {
    angles: Vec<f64>,
    probabilities: Vec<f64>,
    reference: (f64, f64),
}

impl NormalizedScan {
    /// Validates and assembles a normalized scan.
    pub fn new(angles: Vec<f64>, probabilities: Vec<f64>, reference: (f64, f64)) -> Result<Self> {
        if angles.is_empty() || angles.len() != probabilities.len() {
            return Err(Error::Scan(format!(
                "{} angles vs {} probabilities",
                angles.len(),
                probabilities.len()
            )));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::Scan("angles must be finite".into()));
        }
        if probabilities.iter().any(|p| !p.is_finite()) {
            return Err(Error::Scan("probabilities must be finite".into()));
        }
        let (lo, hi) = reference;
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo) {
            return Err(Error::Calibration(format!(
                "reference extrema must satisfy high > low >= 0, got ({lo}, {hi})"
            )));
        }
        Ok(Self {
            angles,
            probabilities,
            reference,
        })
    }

    /// Analyzer angles in radians.
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Normalized values approximating p(α), unclamped.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// (low, high) reference intensities used by the normalization.
    pub fn reference(&self) -> (f64, f64) {
        self.reference
    }
}

fn scale_factor(calibration: &PLScan, scan: &PLScan) -> Result<f64> {
    let (cal_lo, cal_hi) = calibration.intensity_extrema();
    let (scan_lo, scan_hi) = scan.intensity_extrema();
    let cal_sum = cal_lo + cal_hi;
    let scan_sum = scan_lo + scan_hi;
    if scan_sum <= 0.0 {
        return Err(Error::Scan(
            "scan carries no intensity; cannot rescale onto the calibration".into(),
        ));
    }
    if cal_sum <= 0.0 {
        return Err(Error::Calibration(
            "calibration scan carries no intensity".into(),
        ));
    }
    Ok(cal_sum / scan_sum)
}

/// Normalizes a scan against a measured equatorial (θ = π/2) calibration scan
/// taken under the same conditions: p(α) = (r·I(α) − low)/(high − low) with
/// (low, high) the calibration extrema and r the ratio of calibration to scan
/// extrema sums (compensating overall intensity drift). On noiseless input
/// this removes the lifetime visibility and reproduces the ideal projection
/// probability of the prepared state.
pub fn normalize_scan(scan: &PLScan, calibration: &PLScan) -> Result<NormalizedScan> {
    let (lo, hi) = calibration.intensity_extrema();
    let span = hi - lo;
    if span <= 1e-12 * hi.abs().max(1.0) {
        return Err(Error::Calibration(format!(
            "calibration scan shows no modulation (extrema {lo} and {hi})"
        )));
    }
    let r = scale_factor(calibration, scan)?;
    let probabilities = scan
        .intensities()
        .iter()
        .map(|&i| (r * i - lo) / span)
        .collect();
    NormalizedScan::new(scan.angles().to_vec(), probabilities, (lo, hi))
}

/// Normalizes a scan onto the emitting-state probability scale using the
/// session's intensity decomposition: p(α) = (r·I(α) − (I1+I2))/I3. Unlike
/// `normalize_scan` this keeps the lifetime-visibility factor in the data, so
/// fits report the time-averaged emitting state. Without a calibration scan,
/// r = 1 and the scan's own session parameters define the scale; with one,
/// the calibration's parameters define the scale and r compensates drift.
pub fn normalize_emitting(scan: &PLScan, calibration: Option<&PLScan>) -> Result<NormalizedScan> {
    let params = calibration.map_or(scan.params(), |c| c.params());
    let lo = params.i1() + params.i2();
    let i3 = params.i3();
    if i3 <= 0.0 {
        return Err(Error::Calibration(
            "session parameters report no coherent emission channel (i3 = 0)".into(),
        ));
    }
    let r = match calibration {
        None => 1.0,
        Some(cal) => scale_factor(cal, scan)?,
    };
    let probabilities = scan
        .intensities()
        .iter()
        .map(|&i| (r * i - lo) / i3)
        .collect();
    NormalizedScan::new(scan.angles().to_vec(), probabilities, (lo, lo + i3))
}

/// Maps measured circular polarization to diagonal elements through the
/// coherent-channel fraction q3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalCalibration {
    q3: f64,
    residual_rms: Option<f64>,
}

impl DiagonalCalibration {
    /// Builds a calibration from a known coherent-channel fraction q3 ∈ (0, 1].
    pub fn new(q3: f64) -> Result<Self> {
        if !q3.is_finite() || q3 <= 0.0 || q3 > 1.0 {
            return Err(Error::Calibration(format!(
                "q3 must lie in (0, 1], got {q3}"
            )));
        }
        Ok(Self {
            q3,
            residual_rms: None,
        })
    }

    /// Coherent-channel intensity fraction.
    pub fn q3(&self) -> f64 {
        self.q3
    }

    /// RMS residual of the regression this calibration came from, when fitted.
    pub fn residual_rms(&self) -> Option<f64> {
        self.residual_rms
    }

    /// Retrieves diagonal elements (p0, p1) from a measured circular
    /// polarization: the ratio η/q3 estimates cosθ and is clamped to [−1, 1].
    pub fn retrieve(&self, eta_c: f64) -> (f64, f64) {
        let cos_theta = (eta_c / self.q3).clamp(-1.0, 1.0);
        ((1.0 + cos_theta) / 2.0, (1.0 - cos_theta) / 2.0)
    }
}

/// Fits the coherent-channel fraction q3 from (cosθ_prepared, η_C_measured)
/// samples by a least-squares slope through the origin.
pub fn fit_diagonal(samples: &[(f64, f64)]) -> Result<DiagonalCalibration> {
    if samples.len() < 2 {
        return Err(Error::Fit(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    if samples
        .iter()
        .any(|&(x, y)| !x.is_finite() || !y.is_finite())
    {
        return Err(Error::Fit("samples must be finite".into()));
    }
    let first = samples[0].0;
    if samples.iter().all(|&(x, _)| (x - first).abs() <= 1e-12) {
        return Err(Error::Fit(
            "all cos(theta) values coincide; slope is undetermined".into(),
        ));
    }
    let sum_xx: f64 = samples.iter().map(|&(x, _)| x * x).sum();
    let sum_xy: f64 = samples.iter().map(|&(x, y)| x * y).sum();
    let mut q3 = sum_xy / sum_xx;
    if q3 <= 0.0 {
        return Err(Error::Calibration(format!(
            "fitted q3 must be positive, got {q3}"
        )));
    }
    if q3 > 1.0 + 1e-6 {
        return Err(Error::Calibration(format!(
            "fitted q3 exceeds 1 beyond tolerance, got {q3}"
        )));
    }
    q3 = q3.min(1.0);
    let residual_rms = (samples
        .iter()
        .map(|&(x, y)| (y - q3 * x).powi(2))
        .sum::<f64>()
        / samples.len() as f64)
        .sqrt();
    Ok(DiagonalCalibration {
        q3,
        residual_rms: Some(residual_rms),
    })
}

/// Result of the three-parameter trigonometric least squares
/// p(α) ≈ offset + re·cos2α + im·sin2α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffDiagonalFit {
    /// Coefficient of cos2α — the real part of the fitted coherence.
    pub re: f64,
    /// Coefficient of sin2α — the imaginary part of the fitted coherence.
    pub im: f64,
    /// Constant term (1/2 for ideal data).
    pub offset: f64,
    /// RMS of the fit residuals.
    pub residual_rms: f64,
}

/// Solves a 3×3 linear system by Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Result<[f64; 3]> {
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()))
        .max(1.0);
    for col in 0..3 {
        let pivot_row = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() <= 1e-12 * scale {
            return Err(Error::Fit(
                "design matrix is singular or nearly singular".into(),
            ));
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col];
        for row in (col + 1)..3 {
            let f = a[row][col] / pivot[col];
            for (target, &p) in a[row].iter_mut().zip(&pivot).skip(col) {
                *target -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in (row + 1)..3 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Fits p(α) = offset + re·cos2α + im·sin2α by ordinary least squares over
/// the normalized scan. Angles are folded by the π period before fitting;
/// the fit needs ≥ 3 distinct folded angles spanning at least a quarter turn.
pub fn fit_offdiagonal(nscan: &NormalizedScan) -> Result<OffDiagonalFit> {
    let angles = nscan.angles();
    let probs = nscan.probabilities();

    let mut folded: Vec<f64> = angles.iter().map(|a| a.rem_euclid(PI)).collect();
    folded.sort_by(f64::total_cmp);
    let mut distinct = 1usize;
    for pair in folded.windows(2) {
        if pair[1] - pair[0] > 1e-9 {
            distinct += 1;
        }
    }
    if distinct < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 distinct analyzer angles modulo the half-turn period, got {distinct}"
        )));
    }
    let lo = angles.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = angles.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < PI / 2.0 - 1e-9 {
        return Err(Error::Fit(format!(
            "analyzer angles span {:.4} rad; need at least half a period (π/2)",
            hi - lo
        )));
    }

    let n = angles.len() as f64;
    let (mut sc, mut ss, mut scc, mut sss, mut scs) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut sy, mut syc, mut sys) = (0.0, 0.0, 0.0);
    for (&alpha, &p) in angles.iter().zip(probs) {
        let (s2, c2) = (2.0 * alpha).sin_cos();
        sc += c2;
        ss += s2;
        scc += c2 * c2;
        sss += s2 * s2;
        scs += c2 * s2;
        sy += p;
        syc += p * c2;
        sys += p * s2;
    }
    let coeffs = solve3(
        [[n, sc, ss], [sc, scc, scs], [ss, scs, sss]],
        [sy, syc, sys],
    )?;
    let (offset, re, im) = (coeffs[0], coeffs[1], coeffs[2]);

    let residual_sq: f64 = angles
        .iter()
        .zip(probs)
        .map(|(&alpha, &p)| {
            let model = offset + re * (2.0 * alpha).cos() + im * (2.0 * alpha).sin();
            (p - model).powi(2)
        })
        .sum();
    Ok(OffDiagonalFit {
        re,
        im,
        offset,
        residual_rms: (residual_sq / n).sqrt(),
    })
}

/// Divides a fitted coherence pair by the lifetime visibility v ∈ (0, 1],
/// converting the emitting-state coherence into the prepared-state one.
pub fn decay_compensation(offdiag: (f64, f64), visibility: f64) -> Result<(f64, f64)> {
    if !visibility.is_finite() || visibility <= 0.0 || visibility > 1.0 {
        return Err(Error::Parameter(format!(
            "visibility must lie in (0, 1], got {visibility}"
        )));
    }
    Ok((offdiag.0 / visibility, offdiag.1 / visibility))
}

/// A density matrix assembled from fitted pieces, with its pre-projection raw
/// form and a flag saying whether the physicality projection changed it.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledRho {
    /// The physical (projected) density matrix.
    pub rho: DensityMatrix,
    /// Raw Hermitian matrix before projection.
    pub raw: Mat2,
    /// True when projection moved the matrix by more than the report tolerance.
    pub projection_applied: bool,
}

/// Assembles a density matrix from diagonal elements (p0, p1) and the fitted
/// coherence (re, im): ρ01 = re − i·im per the pure-state phase convention.
/// The diagonal is renormalized when its sum drifts from 1 beyond tolerance.
pub fn assemble_rho(diag: (f64, f64), offdiag: (f64, f64)) -> Result<AssembledRho> {
    let (mut p0, mut p1) = diag;
    let (re, im) = offdiag;
    for (name, v) in [("p0", p0), ("p1", p1), ("re", re), ("im", im)] {
        if !v.is_finite() {
            return Err(Error::Parameter(format!("{name} must be finite, got {v}")));
        }
    }
    let sum = p0 + p1;
    if sum <= 0.0 {
        return Err(Error::Parameter(format!(
            "diagonal sum must be positive, got {sum}"
        )));
    }
    if (sum - 1.0).abs() > tol::DIAGONAL_SUM {
        p0 /= sum;
        p1 /= sum;
    }
    let off = Complex64::new(re, -im);
    let raw = Mat2::new([
        [Complex64::new(p0, 0.0), off],
        [off.conj(), Complex64::new(p1, 0.0)],
    ]);
    let rho = physicality_projection(&raw)?;
    let projection_applied = rho.matrix().max_abs_diff(&raw) > tol::PROJECTION_REPORT;
    Ok(AssembledRho {
        rho,
        raw,
        projection_applied,
    })
}

/// Projects a raw Hermitian, trace-normalized matrix onto the nearest density
/// matrix in Frobenius norm: eigendecompose, clip negative eigenvalues to 0,
/// renormalize the trace to 1. Identity on already-physical inputs and
/// idempotent. Non-Hermitian input (beyond tolerance) is rejected.
pub fn physicality_projection(raw: &Mat2) -> Result<DensityMatrix> {
    if let Ok(rho) = DensityMatrix::new(*raw) {
        return Ok(rho);
    }
    let deviation = raw.hermitian_deviation();
    if deviation > tol::HERMITICITY {
        return Err(Error::NotHermitian { deviation });
    }
    let trace = raw.trace().re;
    if !trace.is_finite() || trace <= 0.0 {
        return Err(Error::InvalidTrace { trace });
    }
    let scaled = raw.hermitian_part().scale(1.0 / trace);
    let (vals, vecs) = scaled.hermitian_eigen();
    let clipped = [vals[0].max(0.0), vals[1].max(0.0)];
    let total = clipped[0] + clipped[1];
    if total <= 0.0 {
        return Err(Error::InvalidTrace { trace: total });
    }
    let renormed = [clipped[0] / total, clipped[1] / total];
    DensityMatrix::new(Mat2::from_eigen(renormed, vecs))
}

/// Options for a full scan-to-state reconstruction.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReconstructionConfig {
    /// Coherent-channel fraction override; defaults to the session parameters.
    pub q3: Option<f64>,
    /// Divide the fitted coherence by this visibility to report the prepared
    /// state instead of the emitting state (default: off).
    pub compensate: Option<f64>,
    /// Target state for fidelity reporting.
    pub target: Option<PureStateAngles>,
}

/// Full output of a reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct TomographyResult {
    /// The reconstructed physical density matrix.
    pub rho: DensityMatrix,
    /// Raw assembled matrix before physicality projection.
    pub raw_rho: Mat2,
    /// RMS residual of the trigonometric fit.
    pub residual_rms: f64,
    /// Fidelity against the configured target state, when one was given.
    pub fidelity_to_target: Option<f64>,
    /// True when the physicality projection moved the raw matrix.
    pub projection_applied: bool,
    /// Fitted modulation amplitude 2·√(re²+im²) of the normalized scan —
    /// estimates visibility·sinθ before any compensation.
    pub visibility_estimate: f64,
    /// Coherent-channel fraction used for diagonal retrieval.
    pub q3: f64,
    /// Visibility divided out of the coherence, when compensation was on.
    pub compensation: Option<f64>,
}

/// Reconstructs a density matrix from a PL scan: diagonal from circular
/// polarization through q3, coherence from the normalized linear-analyzer
/// modulation, optional decay compensation, then physicality projection.
/// The optional calibration scan sets the intensity scale and q3 default.
pub fn reconstruct(
    scan: &PLScan,
    calibration: Option<&PLScan>,
    config: &ReconstructionConfig,
) -> Result<TomographyResult> {
    let reference_params = calibration.map_or(scan.params(), |c| c.params());
    let q3 = match config.q3 {
        Some(q3) => q3,
        None => reference_params.q_fractions()[2],
    };
    let diag_cal = DiagonalCalibration::new(q3)?;
    let eta_c = crate::plmodel::circular_polarization(scan)?;
    let diag = diag_cal.retrieve(eta_c);

    let nscan = normalize_emitting(scan, calibration)?;
    let fit = fit_offdiagonal(&nscan)?;
    let visibility_estimate = 2.0 * (fit.re * fit.re + fit.im * fit.im).sqrt();

    let offdiag = match config.compensate {
        None => (fit.re, fit.im),
        Some(v) => decay_compensation((fit.re, fit.im), v)?,
    };

    let assembled = assemble_rho(diag, offdiag)?;
    let fidelity_to_target = config
        .target
        .as_ref()
        .map(|t| fidelity(&assembled.rho, &pure_state(t)));

    Ok(TomographyResult {
        rho: assembled.rho,
        raw_rho: assembled.raw,
        residual_rms: fit.residual_rms,
        fidelity_to_target,
        projection_applied: assembled.projection_applied,
        visibility_estimate,
        q3,
        compensation: config.compensate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plmodel::{emitting_state, synthesize_scan, NoiseSpec, PhysicalParams};
    use crate::testutil::degree_grid;
    use approx::assert_relative_eq;

    fn noiseless_scan(theta_deg: f64, phi_deg: f64, v: f64) -> crate::plmodel::PLScan {
        let s = PureStateAngles::from_degrees(theta_deg, phi_deg).unwrap();
        let p = PhysicalParams::from_visibility(v, 0.0, 0.0, 1.0, 4.7).unwrap();
        synthesize_scan(&s, &degree_grid(0.0, 360.0, 15.0), &p, &NoiseSpec::None, 0).unwrap()
    }

    #[test]
    fn normalize_against_self_reaches_unity() {
        let cal = noiseless_scan(90.0, 0.0, 0.2);
        let n = normalize_scan(&cal, &cal).unwrap();
        assert_relative_eq!(n.probabilities()[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(n.reference().0, 0.4, epsilon = 1e-12);
        assert_relative_eq!(n.reference().1, 0.6, epsilon = 1e-12);
    }

    #[test]
    fn normalize_removes_lifetime_visibility() {
        // Calibrated normalization reproduces the ideal projection
        // probability of the prepared state for any visibility.
        for (theta_deg, phi_deg, v) in [(60.0, 0.0, 0.2), (60.0, 40.0, 0.35), (30.0, 90.0, 0.7)] {
            let cal = noiseless_scan(90.0, 0.0, v);
            let scan = noiseless_scan(theta_deg, phi_deg, v);
            let s = PureStateAngles::from_degrees(theta_deg, phi_deg).unwrap();
            let rho = pure_state(&s);
            let n = normalize_scan(&scan, &cal).unwrap();
            for (&alpha, &p) in n.angles().iter().zip(n.probabilities()) {
                assert_relative_eq!(
                    p,
                    crate::qstate::born_probability(&rho, alpha),
                    epsilon = 1e-12
                );
            }
        }
        // Frozen spot value: θ = 60°, φ = 0, α = 0 → (1 + sin60°)/2.
        let n = normalize_scan(
            &noiseless_scan(60.0, 0.0, 0.2),
            &noiseless_scan(90.0, 0.0, 0.2),
        )
        .unwrap();
        assert_relative_eq!(n.probabilities()[0], 0.9330127018922193, epsilon = 1e-12);
    }

    #[test]
    fn normalize_flat_scan_maps_to_midpoint() {
        let cal = noiseless_scan(90.0, 0.0, 0.2);
        let pole = noiseless_scan(0.0, 0.0, 0.2);
        let n = normalize_scan(&pole, &cal).unwrap();
        for &p in n.probabilities() {
            assert_relative_eq!(p, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn normalize_rescales_intensity_drift() {
        // A scan recorded at twice the calibration intensity is pulled back
        // by r = 0.5 and normalizes identically.
        let cal = noiseless_scan(90.0, 0.0, 0.2);
        let bright = crate::plmodel::PLScan::new(
            cal.angles().to_vec(),
            cal.intensities().iter().map(|i| 2.0 * i).collect(),
            2.0 * cal.sigma_plus(),
            2.0 * cal.sigma_minus(),
            *cal.params(),
            None,
            None,
        )
        .unwrap();
        let n = normalize_scan(&bright, &cal).unwrap();
        assert_relative_eq!(n.probabilities()[0], 1.0, epsilon = 1e-12);
        let n_emit = normalize_emitting(&bright, Some(&cal)).unwrap();
        assert_relative_eq!(n_emit.probabilities()[0], 0.6, epsilon = 1e-12);
    }

    #[test]
    fn normalize_rejects_degenerate_calibration() {
        let flat = noiseless_scan(0.0, 0.0, 0.2);
        let scan = noiseless_scan(60.0, 0.0, 0.2);
        assert!(matches!(
            normalize_scan(&scan, &flat),
            Err(Error::Calibration(_))
        ));
    }

    #[test]
    fn normalize_emitting_keeps_visibility() {
        let scan = noiseless_scan(60.0, 0.0, 0.2);
        let s = PureStateAngles::from_degrees(60.0, 0.0).unwrap();
        let n = normalize_emitting(&scan, None).unwrap();
        assert_eq!(n.reference(), (0.0, 1.0));
        for (&alpha, &p) in n.angles().iter().zip(n.probabilities()) {
            let expected = 0.5 * (1.0 + 0.2 * s.theta().sin() * (s.phi() - 2.0 * alpha).cos());
            assert_relative_eq!(p, expected, epsilon = 1e-12);
        }
        // Same-regime calibration changes nothing (r = 1 by the extrema-sum
        // invariance across preparations).
        let cal = noiseless_scan(90.0, 0.0, 0.2);
        let n_cal = normalize_emitting(&scan, Some(&cal)).unwrap();
        for (a, b) in n.probabilities().iter().zip(n_cal.probabilities()) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn normalize_emitting_needs_coherent_channel() {
        let s = PureStateAngles::from_degrees(90.0, 0.0).unwrap();
        let p = PhysicalParams::new(1.0, 0.25, 0.0, 1.0, 0.5, 0.0, 4.7).unwrap();
        let scan =
            synthesize_scan(&s, &degree_grid(0.0, 360.0, 15.0), &p, &NoiseSpec::None, 0).unwrap();
        assert!(matches!(
            normalize_emitting(&scan, None),
            Err(Error::Calibration(_))
        ));
    }

    #[test]
    fn diagonal_fit_matches_closed_form_slope() {
        // Measured circular-polarization row over four preparations.
        let samples = [
            (0.0f64.to_radians().cos(), 0.373),
            (30.0f64.to_radians().cos(), 0.354),
            (60.0f64.to_radians().cos(), 0.163),
            (90.0f64.to_radians().cos(), 0.0),
        ];
        let cal = fit_diagonal(&samples).unwrap();
        assert_relative_eq!(cal.q3(), 0.38053649646984566, epsilon = 1e-12);
        assert!(cal.residual_rms().unwrap() > 0.0);

        // Exact synthetic samples recover the slope with zero residual.
        let exact: Vec<(f64, f64)> = [0.0, 30.0, 60.0, 90.0]
            .iter()
            .map(|t: &f64| {
                let c = t.to_radians().cos();
                (c, 0.5 * c)
            })
            .collect();
        let cal = fit_diagonal(&exact).unwrap();
        assert_relative_eq!(cal.q3(), 0.5, epsilon = 1e-12);
        assert!(cal.residual_rms().unwrap() <= 1e-12);
    }

    #[test]
    fn diagonal_fit_rejects_degenerate_input() {
        assert!(matches!(
            fit_diagonal(&[(0.5, 0.2), (0.5, 0.25), (0.5, 0.21)]),
            Err(Error::Fit(_))
        ));
        assert!(matches!(
            fit_diagonal(&[(1.0, -0.3), (0.5, -0.15), (0.0, 0.0)]),
            Err(Error::Calibration(_))
        ));
        assert!(matches!(
            fit_diagonal(&[(1.0, 1.5), (0.5, 0.75), (0.0, 0.0)]),
            Err(Error::Calibration(_))
        ));
        assert!(matches!(fit_diagonal(&[(1.0, 0.4)]), Err(Error::Fit(_))));
    }

    #[test]
    fn diagonal_retrieval_examples() {
        let cal = DiagonalCalibration::new(0.38).unwrap();
        assert_eq!(cal.retrieve(0.0), (0.5, 0.5));
        let (p0, p1) = cal.retrieve(0.38);
        assert_relative_eq!(p0, 1.0, epsilon = 1e-12);
        assert_relative_eq!(p1, 0.0, epsilon = 1e-12);
        // Noise pushing |η/q3| past 1 clamps to a pole.
        assert_eq!(cal.retrieve(0.5), (1.0, 0.0));
        assert_eq!(cal.retrieve(-0.5), (0.0, 1.0));
        assert!(DiagonalCalibration::new(0.0).is_err());
        assert!(DiagonalCalibration::new(1.2).is_err());
    }

    #[test]
    fn offdiagonal_fit_matches_analytic_coefficients() {
        // 13-point grid over 0°–180°, exact probabilities.
        let grid = degree_grid(0.0, 180.0, 15.0);
        for (theta_deg, phi_deg) in [
            (90.0, 0.0),
            (90.0, 90.0),
            (60.0, 45.0),
            (30.0, 120.0),
            (0.0, 0.0),
        ] {
            let s = PureStateAngles::from_degrees(theta_deg, phi_deg).unwrap();
            let rho = pure_state(&s);
            let probs: Vec<f64> = grid
                .iter()
                .map(|&a| crate::qstate::born_probability(&rho, a))
                .collect();
            let n = NormalizedScan::new(grid.clone(), probs, (0.0, 1.0)).unwrap();
            let fit = fit_offdiagonal(&n).unwrap();
            let (st, phi) = (s.theta().sin(), s.phi());
            assert_relative_eq!(fit.re, st * phi.cos() / 2.0, epsilon = 1e-9);
            assert_relative_eq!(fit.im, st * phi.sin() / 2.0, epsilon = 1e-9);
            assert_relative_eq!(fit.offset, 0.5, epsilon = 1e-9);
            assert!(fit.residual_rms <= 1e-12);
        }
    }

    #[test]
    fn offdiagonal_fit_rejects_degenerate_grids() {
        // All angles coincide modulo the period.
        let angles = vec![0.0, PI, 2.0 * PI, 3.0 * PI];
        let n = NormalizedScan::new(angles, vec![1.0; 4], (0.0, 1.0)).unwrap();
        assert!(matches!(fit_offdiagonal(&n), Err(Error::Fit(_))));
        // Too small a span.
        let n = NormalizedScan::new(
            vec![0.0, 0.1, 0.2, 0.3],
            vec![0.9, 0.95, 0.9, 0.85],
            (0.0, 1.0),
        )
        .unwrap();
        assert!(matches!(fit_offdiagonal(&n), Err(Error::Fit(_))));
    }

    #[test]
    fn offdiagonal_fit_reports_residuals() {
        let grid = degree_grid(0.0, 180.0, 15.0);
        let probs: Vec<f64> = grid
            .iter()
            .enumerate()
            .map(|(k, &a)| 0.5 + 0.3 * (2.0 * a).cos() + if k % 2 == 0 { 0.01 } else { -0.01 })
            .collect();
        let n = NormalizedScan::new(grid, probs, (0.0, 1.0)).unwrap();
        let fit = fit_offdiagonal(&n).unwrap();
        assert!(fit.residual_rms > 5e-3 && fit.residual_rms < 2e-2);
        assert_relative_eq!(fit.re, 0.3, epsilon = 5e-3);
    }

    #[test]
    fn decay_compensation_examples() {
        assert_eq!(decay_compensation((0.1, 0.0), 0.2).unwrap(), (0.5, 0.0));
        let (re, im) = decay_compensation((0.0866, 0.0), 0.2).unwrap();
        assert_relative_eq!(re, 0.433, epsilon = 1e-12);
        assert_eq!(im, 0.0);
        assert_eq!(decay_compensation((0.3, -0.2), 1.0).unwrap(), (0.3, -0.2));
        assert!(decay_compensation((0.1, 0.0), 0.0).is_err());
        assert!(decay_compensation((0.1, 0.0), -0.5).is_err());
        assert!(decay_compensation((0.1, 0.0), 1.5).is_err());
    }

    #[test]
    fn assemble_pure_equatorial_state() {
        let out = assemble_rho((0.5, 0.5), (0.5, 0.0)).unwrap();
        assert!(!out.projection_applied);
        let expected = pure_state(&PureStateAngles::new(PI / 2.0, 0.0).unwrap());
        assert!(out.rho.matrix().max_abs_diff(expected.matrix()) <= 1e-12);
    }

    #[test]
    fn assemble_mixed_state_keeps_valid_input() {
        // θ = 60° emitting state at v = 0.2: interior eigenvalues, no
        // projection.
        let out = assemble_rho((0.75, 0.25), (0.0866, 0.0)).unwrap();
        assert!(!out.projection_applied);
        let [l0, l1] = out.rho.eigenvalues();
        let h = (0.25f64 * 0.25 + 0.0866 * 0.0866).sqrt();
        assert_relative_eq!(l0, 0.5 + h, epsilon = 1e-12);
        assert_relative_eq!(l1, 0.5 - h, epsilon = 1e-12);
        assert_relative_eq!(l0, 0.7645743, epsilon = 1e-6);
        assert_relative_eq!(l1, 0.2354257, epsilon = 1e-6);
    }

    #[test]
    fn assemble_projects_overlarge_coherence() {
        let out = assemble_rho((0.5, 0.5), (0.55, 0.0)).unwrap();
        assert!(out.projection_applied);
        assert_relative_eq!(out.rho.entry(0, 1).re, 0.5, epsilon = 1e-12);
        assert_relative_eq!(out.rho.entry(0, 0).re, 0.5, epsilon = 1e-12);
        let [l0, l1] = out.rho.eigenvalues();
        assert_relative_eq!(l0, 1.0, epsilon = 1e-12);
        assert!(l1.abs() <= 1e-12);
    }

    #[test]
    fn assemble_renormalizes_diagonal_drift() {
        let out = assemble_rho((0.6, 0.6), (0.0, 0.0)).unwrap();
        assert_relative_eq!(out.rho.entry(0, 0).re, 0.5, epsilon = 1e-12);
        assert!(assemble_rho((0.0, 0.0), (0.0, 0.0)).is_err());
        assert!(assemble_rho((f64::NAN, 0.5), (0.0, 0.0)).is_err());
    }

    #[test]
    fn assemble_preserves_phase_convention() {
        // Fitted (re, im) = (0, 0.5) is the φ = π/2 equatorial state.
        let out = assemble_rho((0.5, 0.5), (0.0, 0.5)).unwrap();
        let expected = pure_state(&PureStateAngles::new(PI / 2.0, PI / 2.0).unwrap());
        assert!(out.rho.matrix().max_abs_diff(expected.matrix()) <= 1e-12);
    }

    #[test]
    fn projection_is_identity_on_physical_input() {
        let rho = pure_state(&PureStateAngles::new(1.0, 2.0).unwrap());
        let again = physicality_projection(rho.matrix()).unwrap();
        assert_eq!(again.matrix().entries(), rho.matrix().entries());
    }

    #[test]
    fn projection_clips_negative_eigenvalue() {
        let raw = Mat2::from_reals([[1.2, 0.0], [0.0, -0.2]]);
        let rho = physicality_projection(&raw).unwrap();
        assert!(
            rho.matrix()
                .max_abs_diff(&Mat2::from_reals([[1.0, 0.0], [0.0, 0.0]]))
                <= 1e-12
        );

        let raw = Mat2::from_reals([[0.5, 0.6], [0.6, 0.5]]);
        let rho = physicality_projection(&raw).unwrap();
        assert_relative_eq!(rho.entry(0, 1).re, 0.5, epsilon = 1e-12);

        // Idempotence.
        let twice = physicality_projection(rho.matrix()).unwrap();
        assert!(twice.matrix().max_abs_diff(rho.matrix()) <= 1e-12);
    }

    #[test]
    fn projection_rejects_bad_input() {
        let non_hermitian = Mat2::new([
            [Complex64::new(0.5, 0.0), Complex64::new(0.3, 0.1)],
            [Complex64::new(0.3, 0.1), Complex64::new(0.5, 0.0)],
        ]);
        assert!(matches!(
            physicality_projection(&non_hermitian),
            Err(Error::NotHermitian { .. })
        ));
        let negative_trace = Mat2::from_reals([[-0.5, 0.0], [0.0, -0.5]]);
        assert!(matches!(
            physicality_projection(&negative_trace),
            Err(Error::InvalidTrace { .. })
        ));
    }

    #[test]
    fn reconstruct_reports_emitting_state_by_default() {
        let scan = noiseless_scan(60.0, 0.0, 0.2);
        let result = reconstruct(&scan, None, &ReconstructionConfig::default()).unwrap();
        let s = PureStateAngles::from_degrees(60.0, 0.0).unwrap();
        let expected = emitting_state(&s, 0.2).unwrap();
        assert!(result.rho.matrix().max_abs_diff(expected.matrix()) <= 1e-12);
        assert!(!result.projection_applied);
        assert!(result.residual_rms <= 1e-12);
        assert_relative_eq!(result.q3, 1.0, epsilon = 1e-12);
        assert_relative_eq!(
            result.visibility_estimate,
            0.2 * s.theta().sin(),
            epsilon = 1e-9
        );
        assert_eq!(result.compensation, None);
        assert_eq!(result.fidelity_to_target, None);
    }

    #[test]
    fn reconstruct_with_compensation_recovers_prepared_state() {
        for (theta_deg, phi_deg) in [(60.0, 0.0), (90.0, 45.0), (30.0, 90.0)] {
            let s = PureStateAngles::from_degrees(theta_deg, phi_deg).unwrap();
            let p = PhysicalParams::from_visibility(0.2, 0.0, 0.0, 1.0, 4.7).unwrap();
            let scan = synthesize_scan(&s, &degree_grid(0.0, 360.0, 15.0), &p, &NoiseSpec::None, 0)
                .unwrap();
            let cal = noiseless_scan(90.0, 0.0, 0.2);
            let config = ReconstructionConfig {
                compensate: Some(p.visibility()),
                target: Some(s),
                ..Default::default()
            };
            let result = reconstruct(&scan, Some(&cal), &config).unwrap();
            let expected = pure_state(&s);
            assert!(
                result.rho.matrix().max_abs_diff(expected.matrix()) <= 1e-9,
                "prepared-state recovery failed at theta={theta_deg}, phi={phi_deg}"
            );
            assert!(result.fidelity_to_target.unwrap() >= 0.9999);
            assert_eq!(result.compensation, Some(0.2));
        }
    }

    #[test]
    fn reconstruct_handles_thermal_floor_via_q3() {
        let s = PureStateAngles::from_degrees(60.0, 30.0).unwrap();
        let p = PhysicalParams::new(1.0, 0.25, 0.0, 0.2, 0.1, 1.0, 4.7).unwrap();
        let scan =
            synthesize_scan(&s, &degree_grid(0.0, 360.0, 15.0), &p, &NoiseSpec::None, 0).unwrap();
        let result = reconstruct(&scan, None, &ReconstructionConfig::default()).unwrap();
        let expected = emitting_state(&s, p.visibility()).unwrap();
        assert!(result.rho.matrix().max_abs_diff(expected.matrix()) <= 1e-12);
        assert_relative_eq!(result.q3, 1.0 / 1.3, epsilon = 1e-12);

        // An explicit q3 override wins over the session parameters.
        let config = ReconstructionConfig {
            q3: Some(0.5),
            ..Default::default()
        };
        let with_override = reconstruct(&scan, None, &config).unwrap();
        assert_relative_eq!(with_override.q3, 0.5, epsilon = 1e-15);
        assert!(with_override.rho.entry(0, 0).re > result.rho.entry(0, 0).re);
    }
}
