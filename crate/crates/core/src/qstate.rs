//! Valley-qubit states and measurements: preparation angles, density matrices,
//! equatorial projectors/observables, the Born rule, fidelity, and entropy.
//!
//! Basis convention: index 0 is the K valley, index 1 is the K′ valley. A pure
//! state with angles (θ, φ) is cos(θ/2)|K⟩ + sin(θ/2)e^{iφ}|K′⟩, which puts
//! the coherence at ρ01 = sin(θ)e^{−iφ}/2.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::tol;

/// Preparation angles of a pure state: polar θ in [0, π], azimuth φ in [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureStateAngles {
    theta: f64,
    phi: f64,
}

impl PureStateAngles {
    /// Validates θ ∈ [0, π] and φ ∈ [0, 2π), in radians.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(Error::AngleOutOfRange {
                name: "theta",
                value: theta,
                range: "[0, pi]",
            });
        }
        if !phi.is_finite() || !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::AngleOutOfRange {
                name: "phi",
                value: phi,
                range: "[0, 2*pi)",
            });
        }
        Ok(Self { theta, phi })
    }

    /// Converts from degrees; φ is reduced mod 360° first.
    pub fn from_degrees(theta_deg: f64, phi_deg: f64) -> Result<Self> {
        if !theta_deg.is_finite() || !phi_deg.is_finite() {
            return Err(Error::Parameter("angles must be finite".into()));
        }
        let phi = phi_deg.rem_euclid(360.0);
        // rem_euclid can return exactly 360.0 when the input is a tiny negative.
        let phi = if phi >= 360.0 { 0.0 } else { phi };
        Self::new(theta_deg.to_radians(), phi.to_radians())
    }

    /// Polar angle in radians.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Azimuthal angle in radians.
    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// A validated 2×2 density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    m: Mat2,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e−12), trace (1e−12), and eigenvalues ≥ −1e−12.
    pub fn new(m: Mat2) -> Result<Self> {
        let deviation = m.hermitian_deviation();
        if deviation > tol::HERMITICITY {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = m.trace().re;
        if (trace - 1.0).abs() > tol::TRACE {
            return Err(Error::InvalidTrace { trace });
        }
        let (vals, _) = m.hermitian_eigen();
        if vals[1] < -tol::PSD_SLACK {
            return Err(Error::NotPositiveSemidefinite {
                eigenvalue: vals[1],
            });
        }
        Ok(Self { m })
    }

    /// The maximally mixed state I/2.
    pub fn maximally_mixed() -> Self {
        Self {
            m: Mat2::identity().scale(0.5),
        }
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }

    /// Entry at (row, col).
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m.get(row, col)
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        self.m.hermitian_eigen().0
    }

    /// Tr ρ² in [1/2, 1].
    pub fn purity(&self) -> f64 {
        (self.m * self.m).trace().re
    }
}

/// A validated Hermitian observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observable {
    m: Mat2,
}

impl Observable {
    /// Validates Hermiticity within 1e−12.
    pub fn new(m: Mat2) -> Result<Self> {
        let deviation = m.hermitian_deviation();
        if deviation > tol::HERMITICITY {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { m })
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }
}

/// Density matrix of the pure state with the given preparation angles.
pub fn pure_state(angles: &PureStateAngles) -> DensityMatrix {
    let (theta, phi) = (angles.theta(), angles.phi());
    let p0 = (theta / 2.0).cos().powi(2);
    let p1 = (theta / 2.0).sin().powi(2);
    let off = Complex64::from_polar(0.5 * theta.sin(), -phi);
    DensityMatrix {
        m: Mat2::new([
            [Complex64::new(p0, 0.0), off],
            [off.conj(), Complex64::new(p1, 0.0)],
        ]),
    }
}

/// Projector onto the equatorial state (|K⟩ + e^{i2α}|K′⟩)/√2.
///
/// α may be any real angle; the projector has period π in α.
pub fn equatorial_projector(alpha: f64) -> Mat2 {
    let a = alpha.rem_euclid(PI);
    let off = Complex64::from_polar(0.5, -2.0 * a);
    Mat2::new([
        [Complex64::new(0.5, 0.0), off],
        [off.conj(), Complex64::new(0.5, 0.0)],
    ])
}

/// The dichotomic equatorial observable `Π̂_α − Π̂_α^⊥` (squares to identity).
pub fn equatorial_observable(alpha: f64) -> Observable {
    let m = equatorial_projector(alpha).scale(2.0) - Mat2::identity();
    Observable { m }
}

/// Detection probability Tr(Π̂_α ρ), evaluated through the matrix trace.
pub fn born_probability(rho: &DensityMatrix, alpha: f64) -> f64 {
    (equatorial_projector(alpha) * *rho.matrix()).trace().re
}

/// Expectation value Tr(Ô ρ); real for Hermitian inputs.
pub fn expectation(obs: &Observable, rho: &DensityMatrix) -> f64 {
    (*obs.matrix() * *rho.matrix()).trace().re
}

/// Uhlmann fidelity of two qubit states, via the closed 2×2 form
/// F = sqrt(Tr(ρσ) + 2·sqrt(det ρ · det σ)).
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let tr = (*rho.matrix() * *sigma.matrix()).trace().re;
    let dets = rho.matrix().determinant().re * sigma.matrix().determinant().re;
    let f2 = tr.max(0.0) + 2.0 * dets.max(0.0).sqrt();
    f2.max(0.0).sqrt().min(1.0)
}

/// Von Neumann entropy in bits, from the closed-form eigenvalues.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let [a, b] = rho.eigenvalues();
    let term = |p: f64| {
        let p = p.clamp(0.0, 1.0);
        if p > 0.0 {
            -p * p.log2()
        } else {
            0.0
        }
    };
    term(a) + term(b)
}
