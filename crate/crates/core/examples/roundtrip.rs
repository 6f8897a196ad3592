//! Minimal forward-then-inverse roundtrip: synthesize a noiseless scan of a
//! prepared state, reconstruct it with decay compensation, and print the
//! fidelity against the preparation.

use valtomo::plmodel::{synthesize_scan, NoiseSpec, PhysicalParams};
use valtomo::qstate::PureStateAngles;
use valtomo::tomography::{reconstruct, ReconstructionConfig};

fn main() -> valtomo::Result<()> {
    let params = PhysicalParams::from_visibility(0.2, 0.0, 0.0, 1.0, 4.7)?;
    let prepared = PureStateAngles::from_degrees(60.0, 30.0)?;
    let grid: Vec<f64> = (0..25).map(|k| (15.0 * k as f64).to_radians()).collect();
    let scan = synthesize_scan(&prepared, &grid, &params, &NoiseSpec::None, 0)?;

    let result = reconstruct(
        &scan,
        None,
        &ReconstructionConfig {
            compensate: Some(params.visibility()),
            target: Some(prepared),
            ..Default::default()
        },
    )?;
    println!("fidelity: {:?}", result.fidelity_to_target);
    Ok(())
}
