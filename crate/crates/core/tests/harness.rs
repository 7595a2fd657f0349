use std::f64::consts::PI;

use num_complex::Complex64;
use plasticwalk::harness::{lattice_energy, SweepReport};
use plasticwalk::{
    dispersion_scan, estimate_order, make_wavepacket, run_convergence_sweep, CProfile, Encoding,
    ExperimentSpec, Reference, ScalingParams, WalkError, Wavepacket,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec(alpha: f64, c: f64, m: f64, epsilons: &[f64]) -> ExperimentSpec {
    let profile = CProfile::flat(c);
    ExperimentSpec {
        alpha,
        m,
        reference: Reference::for_limit(alpha, &profile),
        profile,
        length: 64.0,
        time: 4.0,
        epsilons: epsilons.to_vec(),
        packet: Wavepacket {
            x0: 32.0,
            width: 8.0,
            k0: PI / 8.0,
            chirality_mix: 1.0,
        },
        encoding: if alpha == 1.0 {
            Encoding::ShiftAndLambda
        } else {
            Encoding::None
        },
    }
}

#[test]
fn packet_mean_momentum() {
    for (n, dx, k0) in [(64usize, 1.0, PI / 8.0), (128, 0.5, -0.7), (256, 0.25, 2.0)] {
        let w = n as f64 * dx / 16.0;
        let psi = make_wavepacket(n, dx, 0.3 * n as f64 * dx, w, k0, 0.4).unwrap();
        // plain DFT, momenta folded into (−π/dx, π/dx]
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..n {
            let signed = if j <= n / 2 {
                j as f64
            } else {
                j as f64 - n as f64
            };
            let k = 2.0 * PI * signed / (n as f64 * dx);
            let mut weight = 0.0;
            for comp in [psi.plus(), psi.minus()] {
                let a: Complex64 = comp
                    .iter()
                    .enumerate()
                    .map(|(l, z)| z * Complex64::from_polar(1.0, -k * l as f64 * dx))
                    .sum();
                weight += a.norm_sqr();
            }
            num += k * weight;
            den += weight;
        }
        assert!(
            (num / den - k0).abs() <= 2.0 * PI / (n as f64 * dx),
            "n={n}"
        );
    }
}

#[test]
fn unresolved_packets_are_refused() {
    assert!(matches!(
        make_wavepacket(64, 1.0, 32.0, 3.9, 0.0, 1.0),
        Err(WalkError::Resolution { .. })
    ));
}

#[test]
fn identity_sweep_is_exact() {
    let report = run_convergence_sweep(&spec(0.0, 0.0, 0.0, &[1.0, 0.5, 0.25])).unwrap();
    assert_eq!(report.rows.len(), 3);
    for r in &report.rows {
        assert!(r.error_l2 <= 1e-12 && r.error_max <= 1e-12);
    }
    assert!(report.fit.is_none());
    assert!(report.fit_note.as_deref().unwrap().contains("exact"));
}

#[test]
fn flat_lattice_limit_is_first_order() {
    let report = run_convergence_sweep(&spec(1.0, 0.5, 0.2, &[0.2, 0.1, 0.05, 0.025])).unwrap();
    assert!(report.failures.is_empty());
    assert!(report.monotone);
    assert!(report.fitted_order().unwrap() >= 0.9);
    for r in &report.rows {
        assert_eq!(r.n, 64);
        assert!((r.time_reached - 4.0).abs() <= r.epsilon);
    }
}

#[test]
fn sweep_reports_grid_adjustments() {
    let s = spec(0.5, 0.8, 0.1, &[0.3, 0.1]);
    let report = run_convergence_sweep(&s).unwrap();
    let adj = &report.adjustments[0];
    assert_eq!(adj.requested_epsilon, 0.3);
    assert_eq!(report.rows[0].n, 117);
    assert!((64.0 / report.rows[0].dx - 117.0).abs() < 1e-9);
    assert!(adj.time_mismatch <= adj.epsilon);
    assert!(report.fit_note.is_some());
}

#[test]
fn reports_are_deterministic() {
    let s = spec(1.0, 0.5, 0.2, &[0.2, 0.1, 0.05]);
    let a = run_convergence_sweep(&s).unwrap();
    let b = run_convergence_sweep(&s).unwrap();
    assert_eq!(a.spec_hash, b.spec_hash);
    assert_eq!(a.spec_hash.len(), 64);
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!(x.error_l2.to_bits(), y.error_l2.to_bits());
        assert_eq!(x.error_max.to_bits(), y.error_max.to_bits());
        assert_eq!((x.epsilon, x.n, x.steps), (y.epsilon, y.n, y.steps));
    }
    assert_ne!(
        a.spec_hash,
        run_convergence_sweep(&spec(1.0, 0.5, 0.3, &[0.2, 0.1, 0.05]))
            .unwrap()
            .spec_hash
    );
}

#[test]
fn csv_and_json_exports() {
    let report = run_convergence_sweep(&spec(1.0, 0.5, 0.2, &[0.2, 0.1, 0.05])).unwrap();
    let csv = report.to_csv();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "epsilon,dt,dx,N,steps,error_l2,error_max,walltime_s"
    );
    assert_eq!(
        SweepReport::CSV_HEADER,
        "epsilon,dt,dx,N,steps,error_l2,error_max,walltime_s"
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 8);
    assert_eq!(first[0].parse::<f64>().unwrap(), 0.2);
    assert_eq!(first[5].parse::<f64>().unwrap(), report.rows[0].error_l2);
    let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(json["spec_hash"], report.spec_hash);
    assert_eq!(json["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn failing_rows_do_not_abort_the_sweep() {
    // κ = 1 at ε = 1 with c = 1 has sin θ = 0 and a massive coin
    let report = run_convergence_sweep(&spec(0.5, 1.0, 0.2, &[1.0, 0.25, 0.0625])).unwrap();
    assert_eq!(report.failures.len(), 1);
    assert_eq!(report.failures[0].epsilon, 1.0);
    assert!(report.failures[0].error.contains("mass"));
    assert_eq!(report.rows.len(), 2);
}

#[test]
fn spec_validation() {
    let mut s = spec(1.0, 0.5, 0.2, &[0.1, 0.2]);
    assert!(s.validate().is_err());
    s.epsilons = vec![0.2, 0.1];
    s.alpha = 1.5;
    assert!(matches!(s.validate(), Err(WalkError::Domain(_))));
    let mut s = spec(0.5, 0.5, 0.2, &[0.2, 0.1]);
    s.profile = CProfile::sine_bump(0.5, 0.3, 64.0);
    assert!(matches!(s.validate(), Err(WalkError::Inhomogeneous)));
}

#[test]
fn spec_json_round_trip() {
    let mut s = spec(0.0, 0.5, 0.1, &[0.5, 0.25]);
    s.profile = CProfile::sine_bump(0.5, 0.3, 64.0);
    s.reference = Reference::CurvedFineGrid { refinement: 8 };
    let text = serde_json::to_string(&s).unwrap();
    let back: ExperimentSpec = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s);
    assert_eq!(back.hash(), s.hash());
}

#[test]
fn noisy_first_order_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let rows: Vec<(f64, f64)> = (0..8)
            .map(|j| {
                let e = 0.2 / 2f64.powi(j);
                (e, 3.0 * e * (1.0 + 0.05 * rng.gen_range(-1.0..1.0)))
            })
            .collect();
        let f = estimate_order(&rows).unwrap();
        assert!((0.9..=1.1).contains(&f.order), "{}", f.order);
        assert!(f.ci < 0.05);
    }
}

#[test]
fn dispersion_massless_zero_mode_and_doubler() {
    let params = ScalingParams::new(0.0, CProfile::flat(0.7), 0.01, 1.0).unwrap();
    let rows = dispersion_scan(&params, 64).unwrap();
    let edge = &rows[0];
    assert!((edge.k + PI).abs() < 1e-15);
    assert!(edge.lattice_energy <= 1e-12);
    assert!((edge.continuum_energy - 0.7 * PI).abs() < 1e-12);
    let zero = &rows[32];
    assert_eq!(zero.k, 0.0);
    assert!(zero.lattice_energy == 0.0 && zero.continuum_energy == 0.0);
    assert!(zero.walk_phase.iter().all(|p| p.abs() < 1e-12));
}

#[test]
fn dispersion_remainder_is_quadratic() {
    for (c, m) in [(1.0, 0.0), (0.5, 0.2), (0.8, 1.0)] {
        let worst = |eps: f64| {
            let params = ScalingParams::new(m, CProfile::flat(c), eps, 1.0).unwrap();
            dispersion_scan(&params, 64)
                .unwrap()
                .iter()
                .map(|r| r.lattice_deviation(eps))
                .fold(0.0, f64::max)
        };
        let (a, b) = (worst(1e-3), worst(5e-4));
        let big_c = b / (5e-4 * 5e-4);
        assert!(big_c <= 10.0 * (c * c + m * m), "C = {big_c}");
        // exact zero for the massless homogeneous walk is allowed
        if a > 1e-14 {
            assert!((a / b).log2() >= 1.8 || b < 1e-14);
        }
    }
}

#[test]
fn dispersion_needs_a_homogeneous_profile() {
    let params = ScalingParams::new(0.1, CProfile::sine_bump(0.5, 0.2, 16.0), 0.1, 1.0).unwrap();
    assert!(matches!(
        dispersion_scan(&params, 8),
        Err(WalkError::Inhomogeneous)
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn packets_are_normalized(
        n in 16usize..200,
        dx in 0.05..1.0f64,
        x0 in -50.0..50.0f64,
        k0 in -3.0..3.0f64,
        mix in 0.0..=1.0f64,
        wf in 4.0..10.0f64,
    ) {
        let psi = make_wavepacket(n, dx, x0, wf * dx, k0, mix).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() <= 1e-13);
        if mix == 1.0 {
            prop_assert!(psi.minus().iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn lattice_energy_is_even_and_bounded(c in 0.0..=1.0f64, m in 0.0..2.0f64, k in -5.0..5.0f64, dx in 0.01..1.0f64) {
        let e = lattice_energy(c, m, k, dx);
        prop_assert!((e - lattice_energy(c, m, -k, dx)).abs() < 1e-15);
        prop_assert!(e <= (c * c * k * k + m * m).sqrt() + 1e-12);
    }
}
