//! Seeded random fixtures shared by the unit tests.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::mat2::Mat2;
use crate::qstate::{DensityMatrix, PureStateAngles};

/// Inclusive analyzer grid in degrees, returned in radians.
pub fn degree_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut k = 0usize;
    loop {
        let a = start + step * k as f64;
        if a > stop + 1e-9 {
            break;
        }
        grid.push(a.to_radians());
        k += 1;
    }
    grid
}

/// Random preparation angles, uniform over the sphere's parameter box.
pub fn random_pure(rng: &mut ChaCha8Rng) -> PureStateAngles {
    PureStateAngles::new(rng.gen_range(0.0..=PI), rng.gen_range(0.0..2.0 * PI)).unwrap()
}

/// Random mixed state drawn uniformly from the Bloch ball.
pub fn random_mixed(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let radius = rng.gen_range(0.0f64..=1.0).cbrt();
    let z = rng.gen_range(-1.0f64..=1.0);
    let azimuth = rng.gen_range(0.0..2.0 * PI);
    let s = (1.0 - z * z).sqrt();
    let (rx, ry, rz) = (
        radius * s * azimuth.cos(),
        radius * s * azimuth.sin(),
        radius * z,
    );
    let m = Mat2::new([
        [
            Complex64::new((1.0 + rz) / 2.0, 0.0),
            Complex64::new(rx / 2.0, -ry / 2.0),
        ],
        [
            Complex64::new(rx / 2.0, ry / 2.0),
            Complex64::new((1.0 - rz) / 2.0, 0.0),
        ],
    ]);
    DensityMatrix::new(m).unwrap()
}

/// Random 2×2 unitary from three phases and a mixing angle.
pub fn random_unitary(rng: &mut ChaCha8Rng) -> Mat2 {
    let t = rng.gen_range(0.0..PI / 2.0);
    let (a, b, g) = (
        rng.gen_range(0.0..2.0 * PI),
        rng.gen_range(0.0..2.0 * PI),
        rng.gen_range(0.0..2.0 * PI),
    );
    Mat2::new([
        [
            Complex64::from_polar(t.cos(), a),
            Complex64::from_polar(t.sin(), b),
        ],
        [
            -Complex64::from_polar(t.sin(), g - b),
            Complex64::from_polar(t.cos(), g - a),
        ],
    ])
}
