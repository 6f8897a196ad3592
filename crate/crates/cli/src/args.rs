//! Argument definitions: subcommands, flags, and the small value parsers for
//! angle grids and target states. Angles cross this boundary in degrees.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

/// Valley-pseudospin qubit toolkit.
#[derive(Debug, Parser)]
#[command(name = "valtomo", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a polarization-resolved PL scan of a prepared state.
    Simulate(SimulateArgs),
    /// Reconstruct a density matrix from a scan (plus calibration).
    Tomo(TomoArgs),
    /// Sweep uncertainty relations of a state over analyzer angles.
    Uncertainty(UncertaintyArgs),
    /// Compute the field-precession pattern and its summary.
    Dynamics(DynamicsArgs),
}

/// Inclusive "start:stop:step" angle grid in degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridSpec {
    /// Grid points in degrees, endpoint included up to a 1e−9 slack.
    pub fn degrees(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut k = 0usize;
        loop {
            let a = self.start + self.step * k as f64;
            if a > self.stop + 1e-9 {
                break;
            }
            out.push(a);
            k += 1;
        }
        out
    }

    /// Grid points in radians.
    pub fn radians(&self) -> Vec<f64> {
        self.degrees().iter().map(|d| d.to_radians()).collect()
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected start:stop:step in degrees, got '{s}'"));
        }
        let mut values = [0.0f64; 3];
        for (slot, part) in values.iter_mut().zip(&parts) {
            *slot = part
                .trim()
                .parse()
                .map_err(|_| format!("'{part}' is not a number"))?;
        }
        let [start, stop, step] = values;
        if !start.is_finite() || !stop.is_finite() || !step.is_finite() {
            return Err("grid bounds must be finite".into());
        }
        if step <= 0.0 {
            return Err(format!("step must be positive, got {step}"));
        }
        if stop < start {
            return Err(format!("stop ({stop}) must not precede start ({start})"));
        }
        Ok(Self { start, stop, step })
    }
}

/// "theta,phi" preparation-angle pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetSpec {
    pub theta_deg: f64,
    pub phi_deg: f64,
}

impl FromStr for TargetSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 2 {
            return Err(format!("expected theta,phi in degrees, got '{s}'"));
        }
        let theta_deg: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| format!("'{}' is not a number", parts[0]))?;
        let phi_deg: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| format!("'{}' is not a number", parts[1]))?;
        Ok(Self { theta_deg, phi_deg })
    }
}

#[derive(Debug, Clone, clap::ValueEnum)]
pub enum NoiseKind {
    /// Intensities equal the model expectation exactly.
    None,
    /// Poisson counting noise at the given --exposure.
    Poisson,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Preparation polar angle in degrees [0, 180].
    #[arg(long)]
    pub theta: f64,
    /// Preparation azimuthal angle in degrees.
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    /// Effective coherence visibility in (0, 1]; shorthand for a session
    /// with t1 = 1 s and t2 chosen to match.
    #[arg(long, conflicts_with_all = ["t1", "t2", "gamma"])]
    pub visibility: Option<f64>,
    /// Population lifetime in seconds (use with --t2).
    #[arg(long, requires = "t2")]
    pub t1: Option<f64>,
    /// Coherence lifetime in seconds (use with --t1).
    #[arg(long, requires = "t1")]
    pub t2: Option<f64>,
    /// Extra coherence-suppression exponent (≥ 0).
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// First thermal-channel intensity.
    #[arg(long, default_value_t = 0.0)]
    pub i1: f64,
    /// Second thermal-channel intensity.
    #[arg(long, default_value_t = 0.0)]
    pub i2: f64,
    /// Coherent-channel intensity.
    #[arg(long, default_value_t = 1.0)]
    pub i3: f64,
    /// Temperature label in kelvin (metadata only).
    #[arg(long, default_value_t = 4.7)]
    pub temperature: f64,
    /// Analyzer grid start:stop:step in degrees.
    #[arg(long, default_value = "0:360:15")]
    pub grid: GridSpec,
    /// Noise model.
    #[arg(long, value_enum, default_value_t = NoiseKind::None)]
    pub noise: NoiseKind,
    /// Counts per unit intensity for Poisson noise.
    #[arg(long)]
    pub exposure: Option<f64>,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path (a .meta.json sidecar is written next to it).
    #[arg(long, default_value = "scan.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TomoArgs {
    /// Input scan CSV (its .meta.json sidecar must sit next to it).
    #[arg(long)]
    pub scan: PathBuf,
    /// Equatorial calibration scan CSV from the same session.
    #[arg(long, conflicts_with = "self_calibrate")]
    pub calibration: Option<PathBuf>,
    /// Use the scan's own session metadata as the intensity reference.
    #[arg(long, conflicts_with = "calibration")]
    pub self_calibrate: bool,
    /// Coherent-channel fraction override in (0, 1].
    #[arg(long)]
    pub q3: Option<f64>,
    /// Divide the fitted coherence by this visibility to report the
    /// prepared state instead of the emitting state.
    #[arg(long, value_name = "V")]
    pub compensate_decay: Option<f64>,
    /// Report fidelity against this target state, as "theta,phi" degrees.
    #[arg(long)]
    pub target: Option<TargetSpec>,
    /// Output JSON path.
    #[arg(long, default_value = "tomography.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct UncertaintyArgs {
    /// State polar angle in degrees (pure-state input).
    #[arg(long, conflicts_with = "rho", required_unless_present = "rho")]
    pub theta: Option<f64>,
    /// State azimuthal angle in degrees (pure-state input).
    #[arg(long, conflicts_with = "rho")]
    pub phi: Option<f64>,
    /// Reconstruction JSON (as written by `tomo`) to analyze instead of
    /// preparation angles.
    #[arg(long)]
    pub rho: Option<PathBuf>,
    /// First analyzer angle in degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub r_angle: f64,
    /// Second-analyzer grid start:stop:step in degrees.
    #[arg(long, default_value = "0:180:2.5")]
    pub grid: GridSpec,
    /// Output CSV path.
    #[arg(long, default_value = "uncertainty.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    /// Magnetic field in tesla (signed).
    #[arg(long, allow_negative_numbers = true)]
    pub b_field: f64,
    /// Effective g-factor (signed).
    #[arg(long, default_value_t = -3.7, allow_negative_numbers = true)]
    pub g_factor: f64,
    /// Population lifetime in seconds.
    #[arg(long, default_value_t = 1.85e-12)]
    pub t1: f64,
    /// Coherence dephasing time in seconds.
    #[arg(long, default_value_t = 0.37e-12)]
    pub t2_star: f64,
    /// Analyzer grid start:stop:step in degrees.
    #[arg(long, default_value = "0:360:5")]
    pub grid: GridSpec,
    /// Output CSV path (a .summary.json sidecar is written next to it).
    #[arg(long, default_value = "pattern.csv")]
    pub out: PathBuf,
}
