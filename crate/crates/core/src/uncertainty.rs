//! Uncertainty relations for pairs of equatorial analyzer observables:
//! entropic (Maassen–Uffink) and deviation-product (Robertson) bounds, plus
//! relative entropy of coherence with a mixedness-corrected lower bound.

use crate::error::{Error, Result};
use crate::qstate::{
    born_probability, equatorial_observable, expectation, von_neumann_entropy, DensityMatrix,
    Observable,
};

/// Binary Shannon entropy in bits; inputs are clamped to [0, 1] so that
/// floating-point excursions a hair outside the interval stay well-defined.
pub fn binary_entropy(p: f64) -> f64 {
    if p.is_nan() {
        return f64::NAN;
    }
    let p = p.clamp(0.0, 1.0);
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// A pair of equatorial analyzer observables at angles r and q (radians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservablePair {
    r_angle: f64,
    q_angle: f64,
}

impl ObservablePair {
    /// Builds a pair; both angles must be finite.
    pub fn new(r_angle: f64, q_angle: f64) -> Result<Self> {
        for (name, v) in [("r_angle", r_angle), ("q_angle", q_angle)] {
            if !v.is_finite() {
                return Err(Error::Parameter(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(Self { r_angle, q_angle })
    }

    /// First analyzer angle (radians).
    pub fn r_angle(&self) -> f64 {
        self.r_angle
    }

    /// Second analyzer angle (radians).
    pub fn q_angle(&self) -> f64 {
        self.q_angle
    }

    /// Angle difference q − r.
    pub fn delta(&self) -> f64 {
        self.q_angle - self.r_angle
    }

    /// The first observable as a matrix.
    pub fn r_observable(&self) -> Observable {
        equatorial_observable(self.r_angle)
    }

    /// The second observable as a matrix.
    pub fn q_observable(&self) -> Observable {
        equatorial_observable(self.q_angle)
    }

    /// Largest squared overlap between eigenvectors of the two observables,
    /// computed from the explicit eigenvectors.
    pub fn overlap_c(&self) -> f64 {
        let (_, rv) = self.r_observable().matrix().hermitian_eigen();
        let (_, qv) = self.q_observable().matrix().hermitian_eigen();
        let mut c = 0.0f64;
        for r in &rv {
            for q in &qv {
                let inner = r[0].conj() * q[0] + r[1].conj() * q[1];
                c = c.max(inner.norm_sqr());
            }
        }
        c.min(1.0)
    }
}

/// Shannon entropy (bits) of the two-outcome analyzer measurement at angle
/// alpha on the given state.
pub fn shannon_entropy_of_measurement(rho: &DensityMatrix, alpha: f64) -> f64 {
    binary_entropy(born_probability(rho, alpha))
}

/// State-independent entropic lower bound log2(1/c) for the pair.
pub fn entropic_bound(pair: &ObservablePair) -> f64 {
    -pair.overlap_c().log2()
}

/// Measured entropy sum H(R) + H(Q) and its lower bound log2(1/c).
pub fn entropic_uncertainty(rho: &DensityMatrix, pair: &ObservablePair) -> (f64, f64) {
    let sum = shannon_entropy_of_measurement(rho, pair.r_angle())
        + shannon_entropy_of_measurement(rho, pair.q_angle());
    (sum, entropic_bound(pair))
}

fn variance(obs: &Observable, rho: &DensityMatrix) -> f64 {
    let m = obs.matrix();
    let squared = Observable::new(*m * *m).expect("product of an observable with itself");
    let second_moment = expectation(&squared, rho);
    let mean = expectation(obs, rho);
    (second_moment - mean * mean).max(0.0)
}

/// Deviation product √(Var R · Var Q) and its Robertson lower bound
/// |⟨[R, Q]⟩|/2, both evaluated explicitly from the matrices.
pub fn robertson_uncertainty(rho: &DensityMatrix, pair: &ObservablePair) -> (f64, f64) {
    let r = pair.r_observable();
    let q = pair.q_observable();
    let product = (variance(&r, rho) * variance(&q, rho)).sqrt();
    let commutator = r.matrix().commutator(q.matrix());
    let mean_commutator = (commutator * *rho.matrix()).trace();
    (product, mean_commutator.norm() / 2.0)
}

/// Relative entropy of coherence with respect to the analyzer eigenbasis at
/// angle alpha: H(p(α)) − S(ρ). Nonnegative; tiny negative floating-point
/// residue is clamped to zero.
pub fn relative_entropy_of_coherence(rho: &DensityMatrix, alpha: f64) -> f64 {
    let c = shannon_entropy_of_measurement(rho, alpha) - von_neumann_entropy(rho);
    if (-1e-12..0.0).contains(&c) {
        0.0
    } else {
        c
    }
}

/// Lower bound on the coherence sum C(R) + C(Q): the entropic bound reduced
/// by the state's mixedness, floored at zero — max(0, log2(1/c) − S(ρ)).
pub fn coherence_bound(rho: &DensityMatrix, pair: &ObservablePair) -> f64 {
    (entropic_bound(pair) - von_neumann_entropy(rho)).max(0.0)
}

/// All uncertainty figures for one state and one observable pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyReport {
    /// First analyzer angle (radians).
    pub r_angle: f64,
    /// Second analyzer angle (radians).
    pub q_angle: f64,
    /// H(R) + H(Q) in bits.
    pub entropy_sum: f64,
    /// Entropic lower bound log2(1/c).
    pub entropic_bound: f64,
    /// √(Var R · Var Q).
    pub deviation_product: f64,
    /// Robertson lower bound |⟨[R, Q]⟩|/2.
    pub robertson_bound: f64,
    /// Relative entropy of coherence in the R eigenbasis.
    pub coherence_r: f64,
    /// Relative entropy of coherence in the Q eigenbasis.
    pub coherence_q: f64,
    /// Lower bound on coherence_r + coherence_q.
    pub coherence_bound: f64,
}

impl UncertaintyReport {
    /// C(R) + C(Q).
    pub fn coherence_sum(&self) -> f64 {
        self.coherence_r + self.coherence_q
    }

    /// Entropy sum minus its bound (≥ 0 up to floating point).
    pub fn entropic_slack(&self) -> f64 {
        self.entropy_sum - self.entropic_bound
    }

    /// Deviation product minus its bound (≥ 0 up to floating point).
    pub fn robertson_slack(&self) -> f64 {
        self.deviation_product - self.robertson_bound
    }

    /// Coherence sum minus its bound (≥ 0 up to floating point).
    pub fn coherence_slack(&self) -> f64 {
        self.coherence_sum() - self.coherence_bound
    }
}

/// Evaluates every uncertainty figure for the state and pair.
pub fn uncertainty_report(rho: &DensityMatrix, pair: &ObservablePair) -> UncertaintyReport {
    let (entropy_sum, ebound) = entropic_uncertainty(rho, pair);
    let (deviation_product, robertson_bound) = robertson_uncertainty(rho, pair);
    UncertaintyReport {
        r_angle: pair.r_angle(),
        q_angle: pair.q_angle(),
        entropy_sum,
        entropic_bound: ebound,
        deviation_product,
        robertson_bound,
        coherence_r: relative_entropy_of_coherence(rho, pair.r_angle()),
        coherence_q: relative_entropy_of_coherence(rho, pair.q_angle()),
        coherence_bound: coherence_bound(rho, pair),
    }
}

/// Sweeps the second analyzer over a grid of angles with the first held
/// fixed, producing one report per grid point.
pub fn uncertainty_sweep(
    rho: &DensityMatrix,
    r_angle: f64,
    q_grid: &[f64],
) -> Result<Vec<UncertaintyReport>> {
    q_grid
        .iter()
        .map(|&q| Ok(uncertainty_report(rho, &ObservablePair::new(r_angle, q)?)))
        .collect()
}
