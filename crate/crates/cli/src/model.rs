//! JSON schemas for sidecar metadata and results, with conversions to and
//! from the core types. All schemas reject unknown keys, and every numeric
//! field is re-validated through the core constructors when loaded.

use std::path::Path;

use anyhow::{ensure, Context, Result};
use serde::{Deserialize, Serialize};
use valtomo::dynamics::PrecessionResult;
use valtomo::mat2::Mat2;
use valtomo::plmodel::{NoiseSpec, PLScan, PhysicalParams};
use valtomo::qstate::{DensityMatrix, PureStateAngles};
use valtomo::tomography::TomographyResult;

/// One complex matrix entry.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

/// 2×2 complex matrix as nested [row][column] pairs.
pub type MatrixJson = [[ComplexJson; 2]; 2];

pub fn matrix_to_json(m: &Mat2) -> MatrixJson {
    let mut out = [[ComplexJson { re: 0.0, im: 0.0 }; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let e = m.get(i, j);
            *slot = ComplexJson { re: e.re, im: e.im };
        }
    }
    out
}

pub fn matrix_from_json(j: &MatrixJson) -> Mat2 {
    let c = |e: ComplexJson| valtomo::Complex64::new(e.re, e.im);
    Mat2::new([[c(j[0][0]), c(j[0][1])], [c(j[1][0]), c(j[1][1])]])
}

/// Preparation angles in degrees.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreparedMeta {
    pub theta_deg: f64,
    pub phi_deg: f64,
}

/// Session parameters; t2_star is stored redundantly and checked on load.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsMeta {
    pub t1: f64,
    pub t2: f64,
    pub t2_star: f64,
    pub gamma: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub temperature: f64,
}

impl ParamsMeta {
    pub fn from_params(p: &PhysicalParams) -> Self {
        Self {
            t1: p.t1(),
            t2: p.t2(),
            t2_star: p.t2_star(),
            gamma: p.gamma(),
            i1: p.i1(),
            i2: p.i2(),
            i3: p.i3(),
            temperature: p.temperature(),
        }
    }

    pub fn to_params(self) -> Result<PhysicalParams> {
        let params = PhysicalParams::new(
            self.t1,
            self.t2,
            self.gamma,
            self.i1,
            self.i2,
            self.i3,
            self.temperature,
        )?;
        let expected = params.t2_star();
        ensure!(
            (self.t2_star - expected).abs() <= 1e-9 * expected.abs().max(1e-300),
            "metadata t2_star = {} is inconsistent with t1/t2 (expected {expected})",
            self.t2_star
        );
        Ok(params)
    }
}

/// Noise model descriptor.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum NoiseMeta {
    None,
    Poisson { exposure: f64 },
}

impl NoiseMeta {
    pub fn from_spec(spec: &NoiseSpec) -> Self {
        match *spec {
            NoiseSpec::None => NoiseMeta::None,
            NoiseSpec::Poisson { exposure } => NoiseMeta::Poisson { exposure },
        }
    }
}

/// Scan sidecar: everything about a scan that the CSV itself cannot carry.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanMeta {
    pub prepared: Option<PreparedMeta>,
    pub params: ParamsMeta,
    pub noise: NoiseMeta,
    pub seed: Option<u64>,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
}

impl ScanMeta {
    pub fn from_scan(scan: &PLScan, noise: &NoiseSpec) -> Self {
        Self {
            prepared: scan.prepared().map(|s| PreparedMeta {
                theta_deg: s.theta().to_degrees(),
                phi_deg: s.phi().to_degrees(),
            }),
            params: ParamsMeta::from_params(scan.params()),
            noise: NoiseMeta::from_spec(noise),
            seed: scan.seed(),
            sigma_plus: scan.sigma_plus(),
            sigma_minus: scan.sigma_minus(),
        }
    }

    /// Rebuilds a validated scan from CSV columns plus this sidecar.
    pub fn into_scan(self, alpha_deg: &[f64], intensities: Vec<f64>) -> Result<PLScan> {
        let params = self.params.to_params()?;
        let prepared = self
            .prepared
            .map(|p| PureStateAngles::from_degrees(p.theta_deg, p.phi_deg))
            .transpose()
            .context("invalid prepared-state angles in metadata")?;
        let angles: Vec<f64> = alpha_deg.iter().map(|d| d.to_radians()).collect();
        Ok(PLScan::new(
            angles,
            intensities,
            self.sigma_plus,
            self.sigma_minus,
            params,
            prepared,
            self.seed,
        )?)
    }
}

/// Reconstruction result as written by the tomo subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomoResultJson {
    pub rho: MatrixJson,
    pub raw_rho: MatrixJson,
    pub residual_rms: f64,
    pub visibility_estimate: f64,
    pub q3: f64,
    pub compensation: Option<f64>,
    pub projection_applied: bool,
    pub fidelity_to_target: Option<f64>,
}

impl TomoResultJson {
    pub fn from_result(result: &TomographyResult) -> Self {
        Self {
            rho: matrix_to_json(result.rho.matrix()),
            raw_rho: matrix_to_json(&result.raw_rho),
            residual_rms: result.residual_rms,
            visibility_estimate: result.visibility_estimate,
            q3: result.q3,
            compensation: result.compensation,
            projection_applied: result.projection_applied,
            fidelity_to_target: result.fidelity_to_target,
        }
    }

    /// Extracts and re-validates the reconstructed density matrix.
    pub fn density_matrix(&self) -> Result<DensityMatrix> {
        Ok(DensityMatrix::new(matrix_from_json(&self.rho))?)
    }
}

/// Precession summary sidecar.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSummaryJson {
    pub omega: f64,
    pub phi_tilde_deg: f64,
    pub rotation_deg: f64,
    pub contrast: f64,
}

impl DynamicsSummaryJson {
    pub fn from_summary(s: &PrecessionResult) -> Self {
        Self {
            omega: s.omega,
            phi_tilde_deg: s.phi_tilde.to_degrees(),
            rotation_deg: s.rotation_angle.to_degrees(),
            contrast: s.contrast_factor,
        }
    }
}

/// Serializes a value as pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value).context("serializing JSON")?;
    text.push('\n');
    Ok(text)
}

/// Parses JSON with file-path context.
pub fn from_json_str<'a, T: Deserialize<'a>>(text: &'a str, origin: &Path) -> Result<T> {
    serde_json::from_str(text).with_context(|| format!("parsing {}", origin.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_meta_roundtrip_and_consistency_check() {
        let p = PhysicalParams::new(1.0, 0.25, 0.1, 0.2, 0.1, 1.0, 4.7).unwrap();
        let meta = ParamsMeta::from_params(&p);
        let back = meta.to_params().unwrap();
        assert_eq!(back, p);

        let mut broken = meta;
        broken.t2_star = 0.5;
        assert!(broken.to_params().is_err());
    }

    #[test]
    fn matrix_json_roundtrip() {
        let m = Mat2::from_reals([[0.75, 0.0866], [0.0866, 0.25]]);
        let j = matrix_to_json(&m);
        let back = matrix_from_json(&j);
        assert_eq!(back.entries(), m.entries());
    }

    #[test]
    fn scan_meta_json_rejects_unknown_keys() {
        let text = r#"{
            "prepared": null,
            "params": {"t1": 1.0, "t2": 0.25, "t2_star": 0.2, "gamma": 0.0,
                       "i1": 0.0, "i2": 0.0, "i3": 1.0, "temperature": 4.7},
            "noise": {"kind": "none"},
            "seed": 0,
            "sigma_plus": 1.0,
            "sigma_minus": 1.0,
            "surprise": true
        }"#;
        assert!(from_json_str::<ScanMeta>(text, Path::new("m.json")).is_err());
    }
}
