//! Forward model of polarization-resolved photoluminescence from a prepared
//! valley-qubit state: three-component emission (two thermal channels plus the
//! valley-coherent channel), lifetime-limited visibility, and optional Poisson
//! counting noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::qstate::PureStateAngles;

/// Emission and relaxation parameters of one measurement session.
///
/// `t2_star` is derived as 1/(1/t1 + 1/t2). The effective coherence visibility
/// of a time-integrated scan is (t2_star/t1)·e^(−gamma); `gamma` defaults to 0
/// and exists as an extra coherence-suppression knob.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    t1: f64,
    t2: f64,
    t2_star: f64,
    gamma: f64,
    i1: f64,
    i2: f64,
    i3: f64,
    temperature: f64,
}

impl PhysicalParams {
    /// Builds a parameter set; times in seconds, intensities in arbitrary
    /// nonnegative units (their sum must be positive), temperature in kelvin
    /// (metadata only).
    pub fn new(
        t1: f64,
        t2: f64,
        gamma: f64,
        i1: f64,
        i2: f64,
        i3: f64,
        temperature: f64,
    ) -> Result<Self> {
        if !t1.is_finite() || t1 <= 0.0 {
            return Err(Error::Parameter(format!("t1 must be positive, got {t1}")));
        }
        if t2 <= 0.0 || t2.is_nan() {
            return Err(Error::Parameter(format!("t2 must be positive, got {t2}")));
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::Parameter(format!(
                "gamma must be nonnegative, got {gamma}"
            )));
        }
        for (name, v) in [("i1", i1), ("i2", i2), ("i3", i3)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Parameter(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        if i1 + i2 + i3 <= 0.0 {
            return Err(Error::Parameter(
                "total emission intensity must be positive".into(),
            ));
        }
        if !temperature.is_finite() || temperature < 0.0 {
            return Err(Error::Parameter(format!(
                "temperature must be nonnegative, got {temperature}"
            )));
        }
        let t2_star = 1.0 / (1.0 / t1 + 1.0 / t2);
        Ok(Self {
            t1,
            t2,
            t2_star,
            gamma,
            i1,
            i2,
            i3,
            temperature,
        })
    }

    /// Builds a session with the requested effective visibility v ∈ (0, 1]
    /// directly (t1 = 1 s, t2 chosen so that t2_star/t1 = v, gamma = 0).
    pub fn from_visibility(
        visibility: f64,
        i1: f64,
        i2: f64,
        i3: f64,
        temperature: f64,
    ) -> Result<Self> {
        if !visibility.is_finite() || visibility <= 0.0 || visibility > 1.0 {
            return Err(Error::Parameter(format!(
                "visibility must lie in (0, 1], got {visibility}"
            )));
        }
        // v = 1 needs t2 → ∞; 1e300 keeps the ratio exactly 1.0 in f64 while
        // remaining serializable as a finite number.
        let t2 = if visibility >= 1.0 {
            1e300
        } else {
            visibility / (1.0 - visibility)
        };
        Self::new(1.0, t2, 0.0, i1, i2, i3, temperature)
    }

    /// Population relaxation time (seconds).
    pub fn t1(&self) -> f64 {
        self.t1
    }

    /// Intervalley coherence decay time (seconds).
    pub fn t2(&self) -> f64 {
        self.t2
    }

    /// Combined dephasing time 1/(1/t1 + 1/t2) (seconds).
    pub fn t2_star(&self) -> f64 {
        self.t2_star
    }

    /// Extra coherence-suppression exponent (dimensionless, ≥ 0).
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Unpolarized thermal-channel intensity.
    pub fn i1(&self) -> f64 {
        self.i1
    }

    /// Second thermal-channel intensity.
    pub fn i2(&self) -> f64 {
        self.i2
    }

    /// Valley-coherent channel intensity.
    pub fn i3(&self) -> f64 {
        self.i3
    }

    /// Temperature label in kelvin (metadata only).
    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// Effective off-diagonal visibility (t2_star/t1)·e^(−gamma) ∈ (0, 1].
    pub fn visibility(&self) -> f64 {
        self.t2_star / self.t1 * (-self.gamma).exp()
    }

    /// Intensity fractions q_i = I_i / (I1 + I2 + I3).
    pub fn q_fractions(&self) -> [f64; 3] {
        let total = self.total_intensity();
        [self.i1 / total, self.i2 / total, self.i3 / total]
    }

    /// I1 + I2 + I3.
    pub fn total_intensity(&self) -> f64 {
        self.i1 + self.i2 + self.i3
    }

    /// True when two sessions share all parameters within 1e−9 relative.
    pub fn same_regime(&self, other: &Self) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0);
        close(self.t1, other.t1)
            && close(self.t2, other.t2)
            && close(self.gamma, other.gamma)
            && close(self.i1, other.i1)
            && close(self.i2, other.i2)
            && close(self.i3, other.i3)
            && close(self.temperature, other.temperature)
    }
}

/// Counting-noise model applied when synthesizing a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    /// Noiseless: intensities equal the model expectation exactly.
    None,
    /// Poisson counting noise: each point draws counts with mean
    /// intensity × exposure, then reports counts/exposure.
    Poisson { exposure: f64 },
}

/// One polarization-resolved PL scan: analyzer angles (radians), measured or
/// synthesized intensities, the two circular-analyzer intensities, and the
/// session parameters it was taken under.
#[derive(Debug, Clone, PartialEq)]
pub struct PLScan {
    angles: Vec<f64>,
    intensities: Vec<f64>,
    sigma_plus: f64,
    sigma_minus: f64,
    params: PhysicalParams,
    prepared: Option<PureStateAngles>,
    seed: Option<u64>,
}

impl PLScan {
    /// Validates and assembles a scan: ≥ 4 strictly increasing finite angles,
    /// nonnegative finite intensities of matching length, nonnegative σ±.
    pub fn new(
        angles: Vec<f64>,
        intensities: Vec<f64>,
        sigma_plus: f64,
        sigma_minus: f64,
        params: PhysicalParams,
        prepared: Option<PureStateAngles>,
        seed: Option<u64>,
    ) -> Result<Self> {
        if angles.len() < 4 {
            return Err(Error::Scan(format!(
                "need at least 4 sample angles, got {}",
                angles.len()
            )));
        }
        if angles.len() != intensities.len() {
            return Err(Error::Scan(format!(
                "{} angles vs {} intensities",
                angles.len(),
                intensities.len()
            )));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::Scan("angles must be finite".into()));
        }
        for pair in angles.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::Scan(format!(
                    "angles must be strictly increasing ({} then {})",
                    pair[0], pair[1]
                )));
            }
        }
        if intensities.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Scan("intensities must be finite and >= 0".into()));
        }
        for (name, v) in [("sigma_plus", sigma_plus), ("sigma_minus", sigma_minus)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Scan(format!("{name} must be finite and >= 0")));
            }
        }
        Ok(Self {
            angles,
            intensities,
            sigma_plus,
            sigma_minus,
            params,
            prepared,
            seed,
        })
    }

    /// Analyzer angles in radians, strictly increasing.
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Intensity at each analyzer angle.
    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    /// σ+ circular-analyzer intensity.
    pub fn sigma_plus(&self) -> f64 {
        self.sigma_plus
    }

    /// σ− circular-analyzer intensity.
    pub fn sigma_minus(&self) -> f64 {
        self.sigma_minus
    }

    /// Session parameters.
    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    /// Preparation angles when known (synthetic scans record them).
    pub fn prepared(&self) -> Option<&PureStateAngles> {
        self.prepared.as_ref()
    }

    /// RNG seed for synthetic scans, None for measured data.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Number of sample points.
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    /// True when the scan holds no points (cannot occur for validated scans).
    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// (smallest, largest) scan intensity.
    pub fn intensity_extrema(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.intensities {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

/// Expected linear-analyzer intensity at angle α for a prepared state:
/// I3·[1 + v·sinθ·cos(φ − 2α)]/2 + I1 + I2, with v the effective visibility.
pub fn ideal_intensity(state: &PureStateAngles, alpha: f64, params: &PhysicalParams) -> f64 {
    let v = params.visibility();
    let modulation = 1.0 + v * state.theta().sin() * (state.phi() - 2.0 * alpha).cos();
    params.i3() * modulation / 2.0 + params.i1() + params.i2()
}

/// Expected circular-analyzer intensities (I(σ+), I(σ−)) for a prepared state:
/// I1 + I2 + (1 ± cosθ)·I3.
pub fn circular_intensities(state: &PureStateAngles, params: &PhysicalParams) -> (f64, f64) {
    let floor = params.i1() + params.i2();
    let cos_theta = state.theta().cos();
    (
        floor + (1.0 + cos_theta) * params.i3(),
        floor + (1.0 - cos_theta) * params.i3(),
    )
}

/// Degree of circular polarization η_C = (σ+ − σ−)/(σ+ + σ−) of a scan.
pub fn circular_polarization(scan: &PLScan) -> Result<f64> {
    polarization_ratio(scan.sigma_plus(), scan.sigma_minus())
}

/// Degree of linear polarization η_L = (I_X − I_Y)/(I_X + I_Y).
pub fn linear_polarization(i_x: f64, i_y: f64) -> Result<f64> {
    polarization_ratio(i_x, i_y)
}

fn polarization_ratio(a: f64, b: f64) -> Result<f64> {
    if !a.is_finite() || !b.is_finite() || a + b <= 0.0 {
        return Err(Error::Parameter(format!(
            "polarization ratio needs a positive total intensity, got {a} + {b}"
        )));
    }
    Ok((a - b) / (a + b))
}

/// Time-averaged density matrix of the emitted light for a prepared state:
/// populations are preserved while the off-diagonal coherence is scaled by
/// the effective visibility v ∈ [0, 1].
pub fn emitting_state(
    state: &PureStateAngles,
    visibility: f64,
) -> Result<crate::qstate::DensityMatrix> {
    if !visibility.is_finite() || !(0.0..=1.0).contains(&visibility) {
        return Err(Error::Parameter(format!(
            "visibility must lie in [0, 1], got {visibility}"
        )));
    }
    let pure = crate::qstate::pure_state(state);
    let m = pure.matrix();
    let damped = crate::mat2::Mat2::new([
        [m.get(0, 0), m.get(0, 1).scale(visibility)],
        [m.get(1, 0).scale(visibility), m.get(1, 1)],
    ]);
    crate::qstate::DensityMatrix::new(damped)
}

/// Synthesizes a scan of the prepared state over the given analyzer grid
/// (radians), applying the requested noise model deterministically per seed.
pub fn synthesize_scan(
    state: &PureStateAngles,
    grid: &[f64],
    params: &PhysicalParams,
    noise: &NoiseSpec,
    seed: u64,
) -> Result<PLScan> {
    let exposure = match *noise {
        NoiseSpec::None => None,
        NoiseSpec::Poisson { exposure } => {
            if !exposure.is_finite() || exposure <= 0.0 {
                return Err(Error::Parameter(format!(
                    "exposure must be positive, got {exposure}"
                )));
            }
            Some(exposure)
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |mean: f64| -> f64 {
        match exposure {
            None => mean,
            Some(exp) => {
                let lambda = mean * exp;
                if lambda <= 0.0 {
                    0.0
                } else {
                    let counts: f64 = Poisson::new(lambda)
                        .expect("positive finite mean")
                        .sample(&mut rng);
                    counts / exp
                }
            }
        }
    };

    let intensities: Vec<f64> = grid
        .iter()
        .map(|&alpha| draw(ideal_intensity(state, alpha, params)))
        .collect();
    let (sp_ideal, sm_ideal) = circular_intensities(state, params);
    let sigma_plus = draw(sp_ideal);
    let sigma_minus = draw(sm_ideal);

    PLScan::new(
        grid.to_vec(),
        intensities,
        sigma_plus,
        sigma_minus,
        *params,
        Some(*state),
        Some(seed),
    )
}
