//! Acceptance suite. One PASS/FAIL line per criterion; exits non-zero if any
//! criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use plasticwalk::harness::{
    dispersion_scan, Encoding, ExperimentSpec, Reference, SweepReport, Wavepacket,
};
use plasticwalk::qca::{
    encoded_walk_step, number_conservation_residual, qca_step_with, verify_encoding, PairPhase,
    QcaOptions,
};
use plasticwalk::slater::{slater_evolve, SlaterState};
use plasticwalk::{
    lambda_matrix, lattice_hamiltonian_curved, lattice_hamiltonian_flat, qw_step,
    run_convergence_sweep, CProfile, Mat2, ScalingParams, Spinor2, SpinorField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_field(rng: &mut ChaCha8Rng, n: usize, dx: f64) -> SpinorField {
    let mut z = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let sites = (0..n).map(|_| Spinor2::new(z(), z())).collect();
    SpinorField::new(sites, dx).unwrap()
}

fn packet() -> Wavepacket {
    Wavepacket {
        x0: 32.0,
        width: 8.0,
        k0: PI / 8.0,
        chirality_mix: 1.0,
    }
}

fn sweep(alpha: f64, profile: CProfile, epsilons: &[f64], reference: Reference) -> SweepReport {
    let spec = ExperimentSpec {
        alpha,
        m: if profile.is_homogeneous() { 0.2 } else { 0.1 },
        profile,
        length: 64.0,
        time: 4.0,
        epsilons: epsilons.to_vec(),
        packet: packet(),
        reference,
        encoding: if alpha == 1.0 {
            Encoding::ShiftAndLambda
        } else {
            Encoding::None
        },
    };
    run_convergence_sweep(&spec).expect("sweep runs")
}

fn fmt_errors(r: &SweepReport) -> String {
    let errs: Vec<String> = r
        .rows
        .iter()
        .map(|row| format!("{:.3e}", row.error_l2))
        .collect();
    format!("errors [{}]", errs.join(", "))
}

fn order(r: &SweepReport) -> f64 {
    r.fitted_order().unwrap_or(f64::NAN)
}

fn sine_bump() -> CProfile {
    CProfile::sine_bump(0.5, 0.3, 64.0)
}

fn unitarity_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst: f64 = 0.0;
    for draw in 0..200 {
        let alpha = rng.gen_range(0.0..=1.0);
        let m = rng.gen_range(0.0..=1.0);
        let eps = [1.0, 0.1, 0.01][draw % 3];
        let n = 32;
        let dx = f64::powf(eps, 1.0 - alpha);
        let profile = if draw % 2 == 0 {
            CProfile::flat(rng.gen_range(0.0..=1.0))
        } else {
            let c0 = rng.gen_range(0.2..0.8);
            let a = rng.gen_range(0.0..f64::min(c0, 1.0 - c0));
            CProfile::sine_bump(c0, a, n as f64 * dx)
        };
        let params = ScalingParams::new(m, profile, eps, alpha).unwrap();
        let f = random_field(&mut rng, n, dx);
        let g = qw_step(&f, &params, 0.0).unwrap();
        worst = worst.max((g.norm_sqr() - f.norm_sqr()).abs() / f.norm_sqr());
    }
    outcome(
        worst <= 1e-12,
        format!("max relative norm change {worst:.2e} over 200 draws"),
    )
}

fn flat_lattice_limit() -> Outcome {
    let r = sweep(
        1.0,
        CProfile::flat(0.5),
        &[0.2, 0.1, 0.05, 0.025, 0.0125],
        Reference::LatticeExact,
    );
    let p = order(&r);
    let last = r.rows.last().map_or(f64::NAN, |row| row.error_l2);
    let pass = r.failures.is_empty() && p >= 0.9 && last <= 1e-2;
    outcome(
        pass,
        format!(
            "p = {p:.3}, smallest-eps error {last:.3e}; {}",
            fmt_errors(&r)
        ),
    )
}

fn flat_dirac_limit() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (alpha, eps) in [
        (0.0, vec![1.0, 0.5, 0.25, 0.125, 0.0625]),
        (0.5, vec![1.0, 0.25, 0.0625, 0.015625]),
    ] {
        let r = sweep(alpha, CProfile::flat(0.5), &eps, Reference::DiracMomentum);
        let p = order(&r);
        let ok = r.failures.is_empty() && p >= 0.9 && r.monotone;
        pass &= ok;
        let check = r
            .reference_check
            .as_ref()
            .map(|c| format!("ref check {:.1e} vs {:.1e}", c.distance, c.threshold))
            .unwrap_or_default();
        parts.push(format!(
            "alpha={alpha}: p = {p:.3}, monotone {}, {}, {check}",
            r.monotone,
            fmt_errors(&r)
        ));
    }
    outcome(pass, parts.join("; "))
}

fn dispersion() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let epsilons = [0.1, 0.05, 0.025, 0.0125];
    for (c, m) in [(1.0, 0.0), (0.5, 0.2), (0.8, 1.0)] {
        let devs: Vec<(f64, f64)> = epsilons
            .iter()
            .map(|&eps| {
                let params = ScalingParams::new(m, CProfile::flat(c), eps, 1.0).unwrap();
                let rows = dispersion_scan(&params, 64).unwrap();
                let dev = rows
                    .iter()
                    .map(|r| r.lattice_deviation(eps))
                    .fold(0.0, f64::max);
                (eps, dev)
            })
            .collect();
        let fit = plasticwalk::estimate_order(&devs).unwrap();
        let constant = devs.iter().map(|(e, d)| d / (e * e)).fold(0.0, f64::max);
        pass &= fit.order >= 1.8;
        parts.push(format!(
            "(c={c}, m={m}): exponent {:.3}, C = {constant:.3e}",
            fit.order
        ));
    }
    let params = ScalingParams::new(0.0, CProfile::flat(1.0), 0.01, 1.0).unwrap();
    let edge = dispersion_scan(&params, 64).unwrap()[0];
    pass &= edge.lattice_energy <= 1e-12;
    parts.push(format!(
        "doubler at k = {:.4}: E = {:.1e}",
        edge.k, edge.lattice_energy
    ));
    outcome(pass, parts.join("; "))
}

fn curved_suite() -> Outcome {
    let h = lattice_hamiltonian_curved(64, 1.0, 0.1, &sine_bump(), 0.0).unwrap();
    let herm = h.hermiticity_residual();
    let b = sweep(
        1.0,
        sine_bump(),
        &[0.05, 0.025, 0.0125, 0.00625, 0.003125],
        Reference::LatticeExact,
    );
    let c = sweep(
        0.0,
        sine_bump(),
        &[1.0, 0.5, 0.25, 0.125, 0.0625],
        Reference::CurvedFineGrid { refinement: 8 },
    );
    let (pb, pc) = (order(&b), order(&c));
    let pass =
        herm <= 1e-13 && pb >= 0.9 && pc >= 0.9 && b.failures.is_empty() && c.failures.is_empty();
    outcome(
        pass,
        format!(
            "(a) hermiticity {herm:.1e}; (b) alpha=1 p = {pb:.3}, {}; (c) alpha=0 p = {pc:.3}, {}",
            fmt_errors(&b),
            fmt_errors(&c)
        ),
    )
}

fn qca_equivalence() -> Outcome {
    let grid = [
        (0.0, 0.0),
        (PI / 2.0, 0.0),
        (1.0, 0.3),
        (0.2, -1.1),
        (0.7, 2.5),
        (1.3, 0.05),
        (2.0, -0.6),
        (2.8, 1.7),
        (PI / 3.0, 0.7),
        (1.5, -3.0),
    ];
    let residual = grid
        .iter()
        .map(|&(t, z)| verify_encoding(t, z, 8).unwrap())
        .fold(0.0, f64::max);
    let angles: Vec<(f64, f64)> = (0..5)
        .map(|l| (0.4 + 0.2 * l as f64, 0.3 - 0.1 * l as f64))
        .collect();
    let leak = [PairPhase::FreeFermion, PairPhase::Printed]
        .iter()
        .map(|&pair_phase| {
            let opts = QcaOptions {
                pair_phase,
                ..Default::default()
            };
            number_conservation_residual(5, &angles, opts).unwrap()
        })
        .fold(0.0, f64::max);
    outcome(
        residual <= 1e-12 && leak == 0.0,
        format!("encoding residual {residual:.1e} over 10 angles; number leak {leak:e} on 5 cells"),
    )
}

fn two_particle_run(pair_phase: PairPhase) -> f64 {
    let cells = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = random_field(&mut rng, cells, 1.0).normalized();
    let b = random_field(&mut rng, cells, 1.0);
    let b = SpinorField::new(
        b.sites()
            .iter()
            .zip(a.sites())
            .map(|(x, y)| *x - y.scale(a.inner(&b)))
            .collect(),
        1.0,
    )
    .unwrap()
    .normalized();
    let slater = SlaterState::new(vec![a, b]).unwrap();
    let angles: Vec<(f64, f64)> = (0..cells)
        .map(|l| (0.9 + 0.1 * l as f64, 0.2 * l as f64 - 0.4))
        .collect();
    let opts = QcaOptions {
        pair_phase,
        ..Default::default()
    };
    let mut state = slater.to_qca_state().unwrap();
    for _ in 0..4 {
        state = qca_step_with(&state, &angles, opts).unwrap();
    }
    let evolved = slater_evolve(&slater, |f| Ok(encoded_walk_step(f, &angles)), 4).unwrap();
    state
        .occupations()
        .iter()
        .zip(evolved.state.occupations())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn free_fermions() -> Outcome {
    let dev = two_particle_run(PairPhase::FreeFermion);
    let printed = two_particle_run(PairPhase::Printed);
    outcome(
        dev <= 1e-10,
        format!(
            "max occupation difference {dev:.1e} after 4 steps (printed |11> phase: {printed:.2e})"
        ),
    )
}

fn identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let params = ScalingParams::new(0.0, CProfile::flat(0.0), 0.25, 0.0).unwrap();
    let f = random_field(&mut rng, 16, params.dx);
    let id = qw_step(&f, &params, 0.0).unwrap().max_distance(&f).unwrap();
    let flat = lattice_hamiltonian_flat(16, 1.0, 0.3, 0.6)
        .unwrap()
        .to_dense();
    let curved = lattice_hamiltonian_curved(16, 1.0, 0.3, &CProfile::flat(0.6), 0.0)
        .unwrap()
        .to_dense();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let had = lambda_matrix(1.0)
        .unwrap()
        .max_abs_diff(&Mat2::from_real(h, h, h, -h));
    outcome(
        id <= 1e-12 && flat == curved && had <= 1e-15,
        format!(
            "identity walk {id:.1e}; curved == flat: {}; Hadamard {had:.1e}",
            flat == curved
        ),
    )
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "1 unitarity suite",
            Duration::from_secs(10),
            unitarity_suite,
        ),
        (
            "2 flat lattice-fermion limit",
            Duration::from_secs(60),
            flat_lattice_limit,
        ),
        (
            "3 flat Dirac limit",
            Duration::from_secs(300),
            flat_dirac_limit,
        ),
        ("4 dispersion", Duration::from_secs(10), dispersion),
        ("5 curved suite", Duration::from_secs(600), curved_suite),
        (
            "6 QCA equivalence",
            Duration::from_secs(60),
            qca_equivalence,
        ),
        (
            "7 free-fermion property",
            Duration::from_secs(60),
            free_fermions,
        ),
        (
            "8 identity and reduction fixtures",
            Duration::from_secs(1),
            identities,
        ),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let result =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| outcome(false, "panicked"));
        let took = start.elapsed();
        let pass = result.pass && took <= budget;
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] criterion {name}: {} ({:.2}s of {}s)",
            if pass { "PASS" } else { "FAIL" },
            result.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
