//! Benchmarks for the hot paths: Born-rule evaluation, a full scan
//! reconstruction, an uncertainty sweep, and the quadrature self-check.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use valtomo::dynamics::{verify_integral, FieldParams, DEFAULT_QUAD_STEPS};
use valtomo::plmodel::{synthesize_scan, NoiseSpec, PhysicalParams};
use valtomo::qstate::{born_probability, pure_state, PureStateAngles};
use valtomo::tomography::{reconstruct, ReconstructionConfig};
use valtomo::uncertainty::uncertainty_sweep;

fn degree_grid(count: usize, step_deg: f64) -> Vec<f64> {
    (0..count)
        .map(|k| (step_deg * k as f64).to_radians())
        .collect()
}

fn bench_born_probability(c: &mut Criterion) {
    let rho = pure_state(&PureStateAngles::new(1.0471975511965976, 0.5).unwrap());
    c.bench_function("born_probability", |b| {
        b.iter(|| born_probability(black_box(&rho), black_box(0.7)))
    });
}

fn bench_reconstruct(c: &mut Criterion) {
    let params = PhysicalParams::from_visibility(0.2, 0.1, 0.1, 1.0, 4.7).unwrap();
    let prepared = PureStateAngles::from_degrees(60.0, 30.0).unwrap();
    let scan = synthesize_scan(
        &prepared,
        &degree_grid(25, 15.0),
        &params,
        &NoiseSpec::None,
        0,
    )
    .unwrap();
    let config = ReconstructionConfig::default();
    c.bench_function("reconstruct_25_point_scan", |b| {
        b.iter(|| reconstruct(black_box(&scan), None, black_box(&config)).unwrap())
    });
}

fn bench_uncertainty_sweep(c: &mut Criterion) {
    let rho = pure_state(&PureStateAngles::from_degrees(90.0, 0.0).unwrap());
    let grid = degree_grid(73, 2.5);
    c.bench_function("uncertainty_sweep_73_angles", |b| {
        b.iter(|| uncertainty_sweep(black_box(&rho), 0.0, black_box(&grid)).unwrap())
    });
}

fn bench_verify_integral(c: &mut Criterion) {
    let params = FieldParams::new(9.0, -3.7, 1.85e-12, 0.37e-12).unwrap();
    c.bench_function("verify_integral_default_steps", |b| {
        b.iter(|| verify_integral(black_box(0.3), black_box(&params), DEFAULT_QUAD_STEPS).unwrap())
    });
}

criterion_group!(
    benches,
    bench_born_probability,
    bench_reconstruct,
    bench_uncertainty_sweep,
    bench_verify_integral
);
criterion_main!(benches);
