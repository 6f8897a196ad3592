//! Dense 2×2 complex matrices with the small closed-form kit the crate needs:
//! arithmetic, traces, commutators, and a characteristic-polynomial Hermitian
//! eigensolver. Nothing iterative.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// Dense 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2 {
    e: [[Complex64; 2]; 2],
}

impl Mat2 {
    /// Builds a matrix from row-major entries.
    pub const fn new(e: [[Complex64; 2]; 2]) -> Self {
        Self { e }
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_reals(r: [[f64; 2]; 2]) -> Self {
        Self::new([
            [Complex64::new(r[0][0], 0.0), Complex64::new(r[0][1], 0.0)],
            [Complex64::new(r[1][0], 0.0), Complex64::new(r[1][1], 0.0)],
        ])
    }

    /// The zero matrix.
    pub fn zero() -> Self {
        Self::default()
    }

    /// The identity matrix.
    pub fn identity() -> Self {
        Self::from_reals([[1.0, 0.0], [0.0, 1.0]])
    }

    /// Entry at (row, col).
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.e[row][col]
    }

    /// Row-major entries.
    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        self.e
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::new([
            [self.e[0][0].conj(), self.e[1][0].conj()],
            [self.e[0][1].conj(), self.e[1][1].conj()],
        ])
    }

    /// Matrix trace.
    pub fn trace(&self) -> Complex64 {
        self.e[0][0] + self.e[1][1]
    }

    /// Determinant.
    pub fn determinant(&self) -> Complex64 {
        self.e[0][0] * self.e[1][1] - self.e[0][1] * self.e[1][0]
    }

    /// Scales every entry by a real factor.
    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for row in &mut out.e {
            for v in row {
                *v *= s;
            }
        }
        out
    }

    /// Commutator `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.e
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry-wise distance to another matrix.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// Largest entry-wise deviation from the conjugate transpose.
    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Nearest Hermitian matrix, `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale(0.5)
    }

    /// Eigenvalues (descending) and matching orthonormal eigenvectors of the
    /// Hermitian part, via the closed-form 2×2 characteristic polynomial.
    ///
    /// Returns `(values, vectors)` where `vectors[k]` is the unit eigenvector
    /// for `values[k]`, expressed in the computational basis.
    pub fn hermitian_eigen(&self) -> ([f64; 2], [[Complex64; 2]; 2]) {
        let h = self.hermitian_part();
        let a = h.e[0][0].re;
        let c = h.e[1][1].re;
        let b = h.e[0][1];
        let mid = 0.5 * (a + c);
        let d = 0.5 * (a - c);
        let r = (d * d + b.norm_sqr()).sqrt();
        let vals = [mid + r, mid - r];

        if r <= f64::EPSILON * (a.abs() + c.abs() + 1.0) {
            // Multiple of the identity: any orthonormal basis is an eigenbasis.
            let one = Complex64::new(1.0, 0.0);
            let zero = Complex64::new(0.0, 0.0);
            return (vals, [[one, zero], [zero, one]]);
        }

        // Pick the better-conditioned component for the dominant eigenvector.
        let raw = if d >= 0.0 {
            [Complex64::new(d + r, 0.0), b.conj()]
        } else {
            [b, Complex64::new(r - d, 0.0)]
        };
        let norm = (raw[0].norm_sqr() + raw[1].norm_sqr()).sqrt();
        let v_plus = [raw[0] / norm, raw[1] / norm];
        let v_minus = [-v_plus[1].conj(), v_plus[0].conj()];
        (vals, [v_plus, v_minus])
    }

    /// Rebuilds `Σ_k vals[k] · v_k v_k†` from an eigensystem.
    pub fn from_eigen(vals: [f64; 2], vecs: [[Complex64; 2]; 2]) -> Self {
        let mut e = [[Complex64::new(0.0, 0.0); 2]; 2];
        for k in 0..2 {
            for (i, row) in e.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v += vals[k] * vecs[k][i] * vecs[k][j].conj();
                }
            }
        }
        Self::new(e)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] += rhs.e[i][j];
            }
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] -= rhs.e[i][j];
            }
        }
        out
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let mut e = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in e.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.e[i][0] * rhs.e[0][j] + self.e[i][1] * rhs.e[1][j];
            }
        }
        Mat2::new(e)
    }
}
