use std::fmt::Write as _;
use std::path::Path;

use plasticwalk::qca::{number_conservation_residual, QcaOptions};
use plasticwalk::{
    dispersion_scan, evolve, make_wavepacket, run_convergence_sweep, verify_encoding, CProfile,
    ScalingParams, SpinorField, WalkError,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, settle, write_atomic, write_json, Check};

/// Errors while setting a run up come from the configuration.
fn setup(e: WalkError) -> CliError {
    match e {
        WalkError::Resolution { width, min } => CliError::config(
            "packet.width",
            format!("packet.width={width} is out of range, must be >= 4 dx = {min}"),
        ),
        WalkError::Domain(msg) => CliError::config("profile", msg),
        WalkError::Grid(msg) => CliError::config("length", msg),
        WalkError::Inhomogeneous => {
            CliError::config("profile", "this command needs a homogeneous (flat) profile")
        }
        other => CliError::Numerical(other),
    }
}

pub const SNAPSHOT_HEADER: &str = "x,re_plus,im_plus,re_minus,im_minus,density";

pub fn snapshot_csv(field: &SpinorField) -> String {
    let mut s = String::from(SNAPSHOT_HEADER);
    s.push('\n');
    for (l, v) in field.sites().iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            num(field.x(l)),
            num(v.plus.re),
            num(v.plus.im),
            num(v.minus.re),
            num(v.minus.im),
            num(v.norm_sqr())
        );
    }
    s
}

/// `Σ_l 2 c(x_l) Re(ψ⁺* ψ⁻)`, the expectation of the Dirac velocity `c σ_x`.
fn current(field: &SpinorField, profile: &CProfile, t: f64) -> f64 {
    field
        .sites()
        .iter()
        .enumerate()
        .map(|(l, v)| 2.0 * profile.eval(t, field.x(l)) * (v.plus.conj() * v.minus).re)
        .sum()
}

fn mean_position(field: &SpinorField) -> f64 {
    field
        .density()
        .iter()
        .enumerate()
        .map(|(l, p)| p * field.x(l))
        .sum()
}

#[derive(Serialize)]
struct SimulateSummary {
    epsilon: f64,
    requested_epsilon: f64,
    alpha: f64,
    n: usize,
    dx: f64,
    steps: usize,
    time_reached: f64,
    snapshots: Vec<String>,
    norm_drift: f64,
    initial_current: f64,
    final_current: f64,
    initial_mean_x: f64,
    final_mean_x: f64,
    checks: Vec<Check>,
}

pub fn simulate(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let spec = cfg.experiment(vec![cfg.epsilon]);
    let (eps, n) = spec.snap_epsilon(cfg.epsilon).map_err(setup)?;
    let params = ScalingParams::new(cfg.m, cfg.profile.clone(), eps, cfg.alpha).map_err(setup)?;
    let dx = params.dx;
    cfg.profile.validate_on_grid(n, dx, 0.0).map_err(setup)?;
    let p = &cfg.packet;
    let psi0 = make_wavepacket(n, dx, p.x0, p.width, p.k0, p.chirality_mix).map_err(setup)?;
    let steps = ((cfg.time / (2.0 * eps)).round() as usize).max(1);
    if eps != cfg.epsilon {
        println!("epsilon snapped from {} to {} (N = {n})", cfg.epsilon, eps);
    }
    println!(
        "simulate: alpha={} m={} {} N={n} dx={dx} steps={steps}",
        cfg.alpha,
        cfg.m,
        cfg.profile.label()
    );

    let dir = out.join("snapshots");
    let mut names = Vec::new();
    let mut drift: f64 = 0.0;
    let mut psi = psi0.clone();
    let mut done = 0;
    loop {
        let name = format!("step_{done:07}.csv");
        write_atomic(&dir.join(&name), &snapshot_csv(&psi))?;
        names.push(name);
        drift = drift.max((psi.norm() - 1.0).abs());
        if done == steps {
            break;
        }
        let chunk = cfg.stride.min(steps - done);
        psi = evolve(&psi, &params, 2.0 * eps * done as f64, chunk)?;
        done += chunk;
    }
    let t = 2.0 * eps * steps as f64;
    let summary = SimulateSummary {
        epsilon: eps,
        requested_epsilon: cfg.epsilon,
        alpha: cfg.alpha,
        n,
        dx,
        steps,
        time_reached: t,
        snapshots: names,
        norm_drift: drift,
        initial_current: current(&psi0, &cfg.profile, 0.0),
        final_current: current(&psi, &cfg.profile, t),
        initial_mean_x: mean_position(&psi0),
        final_mean_x: mean_position(&psi),
        checks: vec![Check::at_most("norm drift", drift, 1e-10)],
    };
    println!("final norm: {}", num(psi.norm()));
    println!("norm drift: {:e}", summary.norm_drift);
    println!(
        "current <c sigma_x>: {} -> {}",
        num(summary.initial_current),
        num(summary.final_current)
    );
    println!(
        "mean x: {} -> {}",
        num(summary.initial_mean_x),
        num(summary.final_mean_x)
    );
    println!("{} snapshots in {}", summary.snapshots.len(), dir.display());
    write_json(&out.join("simulate.json"), &summary)?;
    settle(&summary.checks)
}

#[derive(Serialize)]
struct SweepSummary {
    spec_hash: String,
    fitted_order: Option<f64>,
    checks: Vec<Check>,
}

pub fn sweep(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let spec = cfg.experiment(cfg.epsilons.clone());
    spec.validate().map_err(setup)?;
    let report = run_convergence_sweep(&spec)?;
    println!(
        "sweep: alpha={} m={} {} reference={} ({} rows)",
        report.alpha,
        report.m,
        report.profile,
        report.reference,
        report.rows.len()
    );
    println!(
        "{:>12} {:>6} {:>8} {:>14} {:>14}",
        "epsilon", "N", "steps", "error_l2", "error_max"
    );
    for r in &report.rows {
        println!(
            "{:>12.6e} {:>6} {:>8} {:>14.6e} {:>14.6e}",
            r.epsilon, r.n, r.steps, r.error_l2, r.error_max
        );
    }
    for f in &report.failures {
        println!("row epsilon={} failed: {}", f.epsilon, f.error);
    }
    for a in &report.adjustments {
        println!(
            "epsilon {} -> {} (time mismatch {:e})",
            a.requested_epsilon, a.epsilon, a.time_mismatch
        );
    }
    match (&report.fit, &report.fit_note) {
        (Some(f), _) => println!("fitted order p = {:.4} +- {:.4}", f.order, f.ci),
        (None, Some(note)) => println!("no fit: {note}"),
        _ => {}
    }
    if !report.monotone {
        println!("warning: errors are not monotone in epsilon");
    }
    write_atomic(&out.join("sweep.csv"), &report.to_csv())?;
    write_atomic(&out.join("sweep.json"), &(report.to_json() + "\n"))?;

    let mut checks = vec![Check::at_most(
        "failed rows",
        report.failures.len() as f64,
        0.0,
    )];
    if let Some(rc) = &report.reference_check {
        checks.push(Check::at_most(
            "reference cross-check",
            rc.distance,
            rc.threshold,
        ));
    }
    if let Some(min) = cfg.min_order {
        checks.push(Check::at_least(
            "fitted order",
            report.fitted_order().unwrap_or(f64::NAN),
            min,
        ));
        checks.push(Check::at_least(
            "monotone",
            if report.monotone { 1.0 } else { 0.0 },
            1.0,
        ));
    }
    let summary = SweepSummary {
        spec_hash: report.spec_hash.clone(),
        fitted_order: report.fitted_order(),
        checks,
    };
    write_json(&out.join("sweep_summary.json"), &summary)?;
    settle(&summary.checks)
}

pub const DISPERSION_HEADER: &str =
    "k,walk_phase_lower,walk_phase_upper,lattice_energy,continuum_energy";

pub fn dispersion(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    if !cfg.profile.is_homogeneous() {
        return Err(setup(WalkError::Inhomogeneous));
    }
    let params =
        ScalingParams::new(cfg.m, cfg.profile.clone(), cfg.epsilon, cfg.alpha).map_err(setup)?;
    cfg.profile.sample(0.0, 0.0).map_err(setup)?;
    let rows = dispersion_scan(&params, cfg.k_count)?;
    let mut csv = String::from(DISPERSION_HEADER);
    csv.push('\n');
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            num(r.k),
            num(r.walk_phase[0]),
            num(r.walk_phase[1]),
            num(r.lattice_energy),
            num(r.continuum_energy)
        );
    }
    write_atomic(&out.join("dispersion.csv"), &csv)?;
    let worst = rows
        .iter()
        .map(|r| r.lattice_deviation(cfg.epsilon))
        .fold(0.0, f64::max);
    let edge = &rows[0];
    println!(
        "dispersion: alpha={} m={} {} epsilon={} dx={} ({} momenta)",
        cfg.alpha,
        cfg.m,
        cfg.profile.label(),
        cfg.epsilon,
        params.dx,
        rows.len()
    );
    println!(
        "zone edge k={}: lattice_energy={} continuum_energy={}",
        num(edge.k),
        num(edge.lattice_energy),
        num(edge.continuum_energy)
    );
    if let Some(zero) = rows.iter().find(|r| r.k == 0.0) {
        println!(
            "k=0: lattice_energy={} continuum_energy={}",
            num(zero.lattice_energy),
            num(zero.continuum_energy)
        );
    }
    println!("max |walk_phase -+ 2 eps E_lattice| = {worst:e}");
    Ok(())
}

#[derive(Serialize)]
struct QcaSummary {
    cells: usize,
    theta: f64,
    zeta: f64,
    checks: Vec<Check>,
}

pub fn qca(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let q = &cfg.qca;
    if 2 * q.cells > plasticwalk::qca::QUBIT_BUDGET {
        return Err(CliError::config(
            "qca.cells",
            format!(
                "qca.cells={} is out of range, must be <= {}",
                q.cells,
                plasticwalk::qca::QUBIT_BUDGET / 2
            ),
        ));
    }
    let mut checks = vec![Check::at_most(
        "one-particle encoding residual",
        verify_encoding(q.theta, q.zeta, q.cells)?,
        1e-12,
    )];
    if q.number_check_cells > 0 {
        if q.number_check_cells > 6 {
            return Err(CliError::config(
                "qca.number_check_cells",
                format!(
                    "qca.number_check_cells={} is out of range, must be <= 6",
                    q.number_check_cells
                ),
            ));
        }
        let angles = vec![(q.theta, q.zeta); q.number_check_cells];
        let r = number_conservation_residual(q.number_check_cells, &angles, QcaOptions::default())?;
        checks.push(Check::at_most("particle-number leak", r, 0.0));
    }
    println!("qca: N={} theta={} zeta={}", q.cells, q.theta, q.zeta);
    let summary = QcaSummary {
        cells: q.cells,
        theta: q.theta,
        zeta: q.zeta,
        checks,
    };
    write_json(&out.join("qca.json"), &summary)?;
    settle(&summary.checks)
}
