use std::f64::consts::PI;

use num_complex::Complex64;
use plasticwalk::walk::{lambda_spinor, shift_full};
use plasticwalk::{
    coin_matrix, lambda_matrix, lambda_power, momentum_block, qw_step, CProfile, Mat2,
    ScalingParams, Spinor2, SpinorField,
};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn field_strategy(n: usize) -> impl Strategy<Value = Vec<(f64, f64, f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), n)
}

fn to_field(v: &[(f64, f64, f64, f64)], dx: f64) -> SpinorField {
    let sites = v
        .iter()
        .map(|&(a, b, p, q)| Spinor2::new(c(a, b), c(p, q)))
        .collect();
    SpinorField::new(sites, dx).unwrap()
}

fn plane_wave(n: usize, dx: f64, k: f64, v: Spinor2) -> SpinorField {
    let sites = (0..n)
        .map(|l| v.scale(Complex64::from_polar(1.0, k * l as f64 * dx)))
        .collect();
    SpinorField::new(sites, dx).unwrap()
}

/// `Λ^κ` in the spinor order from an explicit eigenbasis: the `+1`
/// eigenvector of the real symmetric involution is `(cos φ, sin φ)`.
fn spectral_power_oracle(cval: f64, kappa: f64) -> Mat2 {
    let l = lambda_spinor(cval).unwrap();
    let (a, b) = (l.a11.re, l.a12.re);
    let phi = 0.5 * b.atan2(a);
    let (s, co) = phi.sin_cos();
    let p = Mat2::from_real(co, -s, s, co);
    p * Mat2::diag(c(1.0, 0.0), Complex64::from_polar(1.0, PI * kappa)) * p.adjoint()
}

/// `W(k)` assembled from the written-out matrices.
fn w_oracle(cval: f64, m: f64, eps: f64, alpha: f64, k: f64) -> Mat2 {
    let kappa = eps.powf(alpha);
    let dx = eps.powf(1.0 - alpha);
    let theta = (cval * kappa).acos();
    let zeta = if m == 0.0 {
        0.0
    } else {
        m * (PI * kappa).cos() * eps / theta.sin()
    };
    let coin = |z: f64| {
        Mat2::new(
            c(-theta.cos(), 0.0),
            Complex64::from_polar(theta.sin(), -z),
            Complex64::from_polar(theta.sin(), z),
            c(theta.cos(), 0.0),
        )
    };
    let d = Mat2::diag(
        Complex64::from_polar(1.0, k * dx),
        Complex64::from_polar(1.0, -k * dx),
    );
    let lam = spectral_power_oracle(cval, kappa);
    lam.adjoint() * d * coin(-zeta) * d * coin(zeta) * lam
}

#[test]
fn plane_wave_eigenvector_evolves_by_its_eigenvalue() {
    let (cval, m, eps) = (0.5, 0.2, 0.05);
    let params = ScalingParams::new(m, CProfile::flat(cval), eps, 1.0).unwrap();
    let n = 32;
    for j in [0, 1, 5, 16, 27] {
        let k = 2.0 * PI * j as f64 / n as f64;
        let w = w_oracle(cval, m, eps, 1.0, k);
        for lam in w.eigenvalues() {
            // eigenvector of [[a, b], [c, d]] for λ: (b, λ − a), or (λ − d, c)
            let v = if w.a12.norm() > 1e-12 {
                Spinor2::new(w.a12, lam - w.a11)
            } else if w.a21.norm() > 1e-12 {
                Spinor2::new(lam - w.a22, w.a21)
            } else if (lam - w.a11).norm() < 1e-12 {
                Spinor2::new(c(1., 0.), c(0., 0.))
            } else {
                Spinor2::new(c(0., 0.), c(1., 0.))
            };
            let f = plane_wave(n, 1.0, k, v);
            let out = qw_step(&f, &params, 0.0).unwrap();
            assert!(
                out.max_distance(&f.scale(lam)).unwrap() < 1e-12,
                "k index {j}"
            );
        }
    }
}

#[test]
fn momentum_block_matches_the_written_out_product() {
    for (cval, m, eps, alpha) in [
        (0.5, 0.2, 0.05, 1.0),
        (0.9, 0.7, 0.3, 0.0),
        (0.3, 1.0, 0.1, 0.4),
    ] {
        let params = ScalingParams::new(m, CProfile::flat(cval), eps, alpha).unwrap();
        for k in [-1.3, 0.0, 0.4, 2.2] {
            let w = momentum_block(&params, k).unwrap();
            assert!(w.max_abs_diff(&w_oracle(cval, m, eps, alpha, k)) < 1e-13);
        }
    }
}

#[test]
fn lattice_fermion_phases_at_small_epsilon() {
    // remainder after subtracting ∓2εE shrinks at least like ε²
    let (cval, m) = (0.6, 0.3);
    let mut prev: Option<f64> = None;
    for eps in [0.02, 0.01, 0.005, 0.0025] {
        let params = ScalingParams::new(m, CProfile::flat(cval), eps, 1.0).unwrap();
        let mut worst: f64 = 0.0;
        for j in 0..16 {
            let k = -PI + 2.0 * PI * j as f64 / 16.0;
            let e = ((cval * k.sin()).powi(2) + m * m).sqrt();
            let mut p = momentum_block(&params, k).unwrap().eigenphases();
            p.sort_by(f64::total_cmp);
            worst = worst
                .max((p[0] + 2.0 * eps * e).abs())
                .max((p[1] - 2.0 * eps * e).abs());
        }
        assert!(worst < 10.0 * eps * eps);
        if let Some(p) = prev {
            assert!(worst < p / 3.5);
        }
        prev = Some(worst);
    }
}

#[test]
fn shift_has_period_n() {
    let f = to_field(
        &(0..7)
            .map(|l| (l as f64, 0.5, -(l as f64), 0.1))
            .collect::<Vec<_>>(),
        1.0,
    );
    let mut g = f.clone();
    for _ in 0..7 {
        g = shift_full(&g);
    }
    assert_eq!(g, f);
}

#[test]
fn lambda_square_root_of_sigma_x() {
    let root = lambda_power(0.0, 0.5).unwrap();
    assert!((root * root).max_abs_diff(&Mat2::sigma_x()) < 1e-15);
    assert!(
        lambda_power(0.45, 0.3)
            .unwrap()
            .max_abs_diff(&(Mat2::sigma_x() * spectral_power_oracle(0.45, 0.3) * Mat2::sigma_x()))
            < 1e-14
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steps_preserve_the_norm(
        alpha in 0.0..=1.0f64,
        cval in 0.0..=1.0f64,
        m in 0.0..=1.0f64,
        eps_idx in 0usize..3,
        bump in any::<bool>(),
        values in field_strategy(24),
    ) {
        let eps: f64 = [1.0, 0.1, 0.01][eps_idx];
        let dx = eps.powf(1.0 - alpha);
        let profile = if bump {
            let c0 = 0.2 + 0.6 * cval;
            CProfile::sine_bump(c0, 0.5 * c0.min(1.0 - c0), 24.0 * dx)
        } else {
            CProfile::flat(cval)
        };
        let params = ScalingParams::new(m, profile, eps, alpha).unwrap();
        let f = to_field(&values, dx);
        prop_assume!(f.norm_sqr() > 1e-6);
        match qw_step(&f, &params, 0.3) {
            Ok(g) => prop_assert!((g.norm_sqr() - f.norm_sqr()).abs() <= 1e-12 * f.norm_sqr()),
            // only reachable at alpha = 0, c = 1
            Err(e) => {
                let singular = matches!(e, plasticwalk::WalkError::SingularMass { .. });
                prop_assert!(singular, "{}", e)
            }
        }
    }

    #[test]
    fn lambda_is_an_involution(cval in 0.0..=1.0f64) {
        let l = lambda_matrix(cval).unwrap();
        prop_assert!((l * l).max_abs_diff(&Mat2::identity()) < 1e-14);
    }

    #[test]
    fn lambda_powers_form_a_group(cval in 0.0..=1.0f64, k1 in -3.0..3.0f64, k2 in -3.0..3.0f64) {
        let a = lambda_power(cval, k1).unwrap() * lambda_power(cval, k2).unwrap();
        prop_assert!(a.max_abs_diff(&lambda_power(cval, k1 + k2).unwrap()) < 1e-12);
        prop_assert!(lambda_power(cval, k1).unwrap().is_unitary());
    }

    #[test]
    fn coins_are_unitary_with_determinant_minus_one(theta in -10.0..10.0f64, zeta in -10.0..10.0f64) {
        let m = coin_matrix(theta, zeta);
        prop_assert!(m.unitarity_residual() < 1e-14);
        prop_assert!((m.det() + 1.0).norm() < 1e-14);
    }

    #[test]
    fn plane_waves_see_the_momentum_block(
        cval in 0.0..0.99f64,
        m in 0.0..1.0f64,
        eps in 0.01..1.0f64,
        alpha in 0.0..=1.0f64,
        j in 0usize..20,
        a in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
    ) {
        let n = 20;
        let params = ScalingParams::new(m, CProfile::flat(cval), eps, alpha).unwrap();
        let k = 2.0 * PI * j as f64 / (n as f64 * params.dx);
        let v = Spinor2::new(c(a.0, a.1), c(a.2, a.3));
        let f = plane_wave(n, params.dx, k, v);
        let w = momentum_block(&params, k).unwrap();
        let expect = plane_wave(n, params.dx, k, w.apply(v));
        prop_assert!(qw_step(&f, &params, 0.0).unwrap().max_distance(&expect).unwrap() < 1e-12);
    }

    #[test]
    fn homogeneous_steps_commute_with_rotation(
        cval in 0.0..0.99f64,
        m in 0.0..1.0f64,
        alpha in 0.0..=1.0f64,
        shift in -30isize..30,
        values in field_strategy(16),
    ) {
        let params = ScalingParams::new(m, CProfile::flat(cval), 0.1, alpha).unwrap();
        let f = to_field(&values, params.dx);
        let a = qw_step(&f.rotated(shift), &params, 0.0).unwrap();
        let b = qw_step(&f, &params, 0.0).unwrap().rotated(shift);
        prop_assert!(a.max_distance(&b).unwrap() < 1e-13);
    }
}
