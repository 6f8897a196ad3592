//! Subcommand implementations. Each handler returns the process exit code:
//! 0 success, 1 usage/config error (raised as anyhow errors by main), 2
//! success with the physicality projection applied, 3 I/O error.

use std::path::Path;

use anyhow::{bail, Context, Result};
use valtomo::plmodel::{synthesize_scan, NoiseSpec, PLScan, PhysicalParams};
use valtomo::qstate::{pure_state, DensityMatrix, PureStateAngles};
use valtomo::tomography::{normalize_emitting, reconstruct, ReconstructionConfig};
use valtomo::uncertainty::uncertainty_sweep;
use valtomo::{dynamics, tol, FieldParams};

use crate::args::{Cli, Command, DynamicsArgs, NoiseKind, SimulateArgs, TomoArgs, UncertaintyArgs};
use crate::io::{
    meta_path, parse_scan_csv, read_file, render_scan_csv, resolve_out, summary_path, write_atomic,
};
use crate::model::{from_json_str, to_json_string, DynamicsSummaryJson, ScanMeta, TomoResultJson};

/// Runs the selected subcommand and reports its exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Tomo(args) => cmd_tomo(args),
        Command::Uncertainty(args) => cmd_uncertainty(args),
        Command::Dynamics(args) => cmd_dynamics(args),
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32> {
    let params = match (args.visibility, args.t1, args.t2) {
        (Some(v), None, None) => {
            PhysicalParams::from_visibility(v, args.i1, args.i2, args.i3, args.temperature)?
        }
        (None, Some(t1), Some(t2)) => PhysicalParams::new(
            t1,
            t2,
            args.gamma,
            args.i1,
            args.i2,
            args.i3,
            args.temperature,
        )?,
        _ => bail!("specify either --visibility or both --t1 and --t2"),
    };
    let noise = match args.noise {
        NoiseKind::None => {
            if args.exposure.is_some() {
                bail!("--exposure only applies with --noise poisson");
            }
            NoiseSpec::None
        }
        NoiseKind::Poisson => NoiseSpec::Poisson {
            exposure: args
                .exposure
                .context("--noise poisson requires --exposure")?,
        },
    };
    let state = PureStateAngles::from_degrees(args.theta, args.phi)?;

    let scan = synthesize_scan(&state, &args.grid.radians(), &params, &noise, args.seed)?;

    let out = resolve_out(&args.out);
    write_atomic(
        &out,
        &render_scan_csv(&args.grid.degrees(), scan.intensities()),
    )?;
    let meta = ScanMeta::from_scan(&scan, &noise);
    write_atomic(&meta_path(&out), &to_json_string(&meta)?)?;

    println!(
        "wrote {} rows to {} (sigma_plus = {}, sigma_minus = {})",
        scan.len(),
        out.display(),
        scan.sigma_plus(),
        scan.sigma_minus()
    );
    Ok(0)
}

/// Loads a scan CSV together with its metadata sidecar.
fn load_scan(csv_path: &Path) -> Result<PLScan> {
    let (alpha_deg, intensities) = parse_scan_csv(&read_file(csv_path)?, csv_path)?;
    let sidecar = meta_path(csv_path);
    let meta: ScanMeta = from_json_str(&read_file(&sidecar)?, &sidecar)?;
    meta.into_scan(&alpha_deg, intensities)
        .with_context(|| format!("assembling scan from {}", csv_path.display()))
}

fn cmd_tomo(args: TomoArgs) -> Result<i32> {
    if args.calibration.is_none() && !args.self_calibrate {
        bail!("provide --calibration <scan.csv> or pass --self-calibrate");
    }
    let scan = load_scan(&args.scan)?;
    let calibration = args.calibration.as_deref().map(load_scan).transpose()?;

    if let Some(cal) = &calibration {
        if !scan.params().same_regime(cal.params()) {
            eprintln!(
                "warning: calibration session parameters differ from the scan's; \
                 the intensity reference may not transfer"
            );
        }
    }
    let normalized = normalize_emitting(&scan, calibration.as_ref())?;
    let outside = normalized
        .probabilities()
        .iter()
        .filter(|&&p| !(-tol::PROBABILITY_SLACK..=1.0 + tol::PROBABILITY_SLACK).contains(&p))
        .count();
    if outside > 0 {
        eprintln!(
            "warning: {outside} of {} normalized values fall outside [{}, {}]; \
             check the calibration and noise level",
            normalized.probabilities().len(),
            -tol::PROBABILITY_SLACK,
            1.0 + tol::PROBABILITY_SLACK
        );
    }

    let config = ReconstructionConfig {
        q3: args.q3,
        compensate: args.compensate_decay,
        target: args
            .target
            .map(|t| PureStateAngles::from_degrees(t.theta_deg, t.phi_deg))
            .transpose()
            .context("invalid --target angles")?,
    };
    let result = reconstruct(&scan, calibration.as_ref(), &config)?;

    let out = resolve_out(&args.out);
    write_atomic(
        &out,
        &to_json_string(&TomoResultJson::from_result(&result))?,
    )?;

    let rho00 = result.rho.entry(0, 0).re;
    let rho01 = result.rho.entry(0, 1);
    println!(
        "rho00 = {rho00:.6}, |rho01| = {:.6}, fit residual rms = {:.3e}; wrote {}",
        rho01.norm(),
        result.residual_rms,
        out.display()
    );
    if result.projection_applied {
        println!("note: raw estimate was unphysical; nearest physical state reported");
    }
    Ok(if result.projection_applied { 2 } else { 0 })
}

fn cmd_uncertainty(args: UncertaintyArgs) -> Result<i32> {
    let rho: DensityMatrix = match (&args.rho, args.theta) {
        (Some(path), None) => {
            let result: TomoResultJson = from_json_str(&read_file(path)?, path)?;
            result
                .density_matrix()
                .with_context(|| format!("{} does not hold a physical state", path.display()))?
        }
        (None, Some(theta_deg)) => {
            let angles = PureStateAngles::from_degrees(theta_deg, args.phi.unwrap_or(0.0))?;
            pure_state(&angles)
        }
        _ => bail!("specify a state with --theta [--phi] or --rho"),
    };

    let alpha_deg = args.grid.degrees();
    let reports = uncertainty_sweep(&rho, args.r_angle.to_radians(), &args.grid.radians())?;

    let mut csv = String::from(
        "alpha_deg,entropy_sum,entropic_bound,deviation_product,robertson_bound,\
         coherence_sum,coherence_bound\n",
    );
    for (deg, report) in alpha_deg.iter().zip(&reports) {
        csv.push_str(&format!(
            "{deg},{},{},{},{},{},{}\n",
            report.entropy_sum,
            report.entropic_bound,
            report.deviation_product,
            report.robertson_bound,
            report.coherence_sum(),
            report.coherence_bound
        ));
    }
    let out = resolve_out(&args.out);
    write_atomic(&out, &csv)?;

    let tightest = reports
        .iter()
        .zip(&alpha_deg)
        .min_by(|a, b| a.0.entropic_slack().total_cmp(&b.0.entropic_slack()))
        .expect("grid is never empty");
    println!(
        "min entropic slack = {} at alpha_deg = {}; wrote {}",
        tightest.0.entropic_slack(),
        tightest.1,
        out.display()
    );
    Ok(0)
}

fn cmd_dynamics(args: DynamicsArgs) -> Result<i32> {
    let params = FieldParams::new(args.b_field, args.g_factor, args.t1, args.t2_star)?;
    let summary = dynamics::precession_summary(&params);

    let alpha_deg = args.grid.degrees();
    let values: Vec<f64> = args
        .grid
        .radians()
        .iter()
        .map(|&a| dynamics::integrated_pl_pattern(a, &params))
        .collect();

    let out = resolve_out(&args.out);
    write_atomic(&out, &render_scan_csv(&alpha_deg, &values))?;
    let summary_json = DynamicsSummaryJson::from_summary(&summary);
    write_atomic(&summary_path(&out), &to_json_string(&summary_json)?)?;

    println!(
        "omega = {:.6e} rad/s, rotation = {:.4} deg, contrast = {:.6}; wrote {}",
        summary.omega,
        summary.rotation_angle.to_degrees(),
        summary.contrast_factor,
        out.display()
    );
    Ok(0)
}
