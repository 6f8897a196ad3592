//! Valley-coherence precession in an in-plane magnetic field: Larmor
//! frequency, free decay of the equatorial coherence, and the time-integrated
//! analyzer pattern with its rotation angle and contrast reduction.

use crate::error::{Error, Result};

/// Physical constants pinned to CODATA 2018 values.
pub mod constants {
    /// Bohr magneton in J/T.
    pub const MU_B: f64 = 9.274_010_078_3e-24;
    /// Reduced Planck constant in J·s.
    pub const HBAR: f64 = 1.054_571_817e-34;
}

/// Default number of quadrature steps for `verify_integral`.
pub const DEFAULT_QUAD_STEPS: usize = 200_000;

/// Magnetic-field and relaxation parameters of a precession experiment.
/// Unlike the emission model, the dephasing time is an independent input
/// here rather than being derived from a pair of lifetimes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    b_field: f64,
    g_factor: f64,
    t1: f64,
    t2_star: f64,
}

impl FieldParams {
    /// Builds parameters: field in tesla (signed), dimensionless g-factor
    /// (signed), lifetimes in seconds (positive).
    pub fn new(b_field: f64, g_factor: f64, t1: f64, t2_star: f64) -> Result<Self> {
        for (name, v) in [("b_field", b_field), ("g_factor", g_factor)] {
            if !v.is_finite() {
                return Err(Error::Parameter(format!("{name} must be finite, got {v}")));
            }
        }
        for (name, v) in [("t1", t1), ("t2_star", t2_star)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Parameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(Self {
            b_field,
            g_factor,
            t1,
            t2_star,
        })
    }

    /// Magnetic field (tesla).
    pub fn b_field(&self) -> f64 {
        self.b_field
    }

    /// Effective g-factor.
    pub fn g_factor(&self) -> f64 {
        self.g_factor
    }

    /// Population lifetime (seconds).
    pub fn t1(&self) -> f64 {
        self.t1
    }

    /// Coherence dephasing time (seconds).
    pub fn t2_star(&self) -> f64 {
        self.t2_star
    }
}

/// Signed angular precession frequency Ω = g·μ_B·B/ħ in rad/s.
pub fn larmor_frequency(params: &FieldParams) -> f64 {
    params.g_factor() * constants::MU_B * params.b_field() / constants::HBAR
}

/// Free evolution of an equatorial coherence for a time t ≥ 0: returns the
/// accumulated phase Ω·t (radians, signed) and the coherence magnitude
/// e^(−t/T2*)/2.
pub fn evolve_equatorial_state(t: f64, params: &FieldParams) -> Result<(f64, f64)> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Parameter(format!(
            "evolution time must be nonnegative, got {t}"
        )));
    }
    let phase = larmor_frequency(params) * t;
    let magnitude = 0.5 * (-t / params.t2_star()).exp();
    Ok((phase, magnitude))
}

/// Summary of the time-integrated precession pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecessionResult {
    /// Signed precession frequency Ω (rad/s).
    pub omega: f64,
    /// Pattern phase shift φ̃ = arctan(Ω·T2*) (radians, signed).
    pub phi_tilde: f64,
    /// Apparent analyzer-pattern rotation φ̃/2 (radians, signed).
    pub rotation_angle: f64,
    /// Contrast reduction factor 1/√(1 + (Ω·T2*)²) ∈ (0, 1].
    pub contrast_factor: f64,
}

/// Computes the integrated-pattern summary for the given parameters.
pub fn precession_summary(params: &FieldParams) -> PrecessionResult {
    let omega = larmor_frequency(params);
    let x = omega * params.t2_star();
    let phi_tilde = x.atan();
    PrecessionResult {
        omega,
        phi_tilde,
        rotation_angle: phi_tilde / 2.0,
        contrast_factor: 1.0 / (1.0 + x * x).sqrt(),
    }
}

/// Time-integrated, normalized analyzer pattern under precession:
/// 1/2 + (T2*/(2·T1))·cos(φ̃ − 2α)/√(1 + (Ω·T2*)²). At B = 0 this reduces to
/// the static emission pattern of an equatorial state with φ = 0.
pub fn integrated_pl_pattern(alpha: f64, params: &FieldParams) -> f64 {
    let summary = precession_summary(params);
    let amplitude = params.t2_star() / (2.0 * params.t1()) * summary.contrast_factor;
    0.5 + amplitude * (summary.phi_tilde - 2.0 * alpha).cos()
}

/// Side-by-side closed-form and quadrature values of the integrated pattern,
/// both normalized by the population lifetime so they live on the same scale
/// as `integrated_pl_pattern`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureCheck {
    /// Closed-form pattern value.
    pub closed_form: f64,
    /// Composite-Simpson value of the defining time integral.
    pub numeric: f64,
}

impl QuadratureCheck {
    /// |numeric − closed|.
    pub fn abs_diff(&self) -> f64 {
        (self.numeric - self.closed_form).abs()
    }

    /// |numeric − closed| relative to the closed form.
    pub fn relative_diff(&self) -> f64 {
        self.abs_diff() / self.closed_form.abs().max(f64::MIN_POSITIVE)
    }
}

/// Cross-checks the closed-form integrated pattern against composite Simpson
/// quadrature of ∫₀^∞ [e^(−t/T1) + e^(−t/T2*)·cos(Ωt − 2α)]/2 dt, truncated
/// at 20 lifetimes. n_steps must be ≥ 1000 (odd counts are rounded up).
pub fn verify_integral(
    alpha: f64,
    params: &FieldParams,
    n_steps: usize,
) -> Result<QuadratureCheck> {
    if n_steps < 1000 {
        return Err(Error::Parameter(format!(
            "need at least 1000 quadrature steps for a meaningful check, got {n_steps}"
        )));
    }
    let n = n_steps + n_steps % 2;
    let omega = larmor_frequency(params);
    let horizon = 20.0 * params.t1().max(params.t2_star());
    let h = horizon / n as f64;
    let f = |t: f64| {
        0.5 * ((-t / params.t1()).exp()
            + (-t / params.t2_star()).exp() * (omega * t - 2.0 * alpha).cos())
    };
    let mut acc = f(0.0) + f(horizon);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(h * k as f64);
    }
    Ok(QuadratureCheck {
        closed_form: integrated_pl_pattern(alpha, params),
        numeric: acc * h / (3.0 * params.t1()),
    })
}
