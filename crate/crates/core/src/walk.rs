//! The Plastic quantum walk: operators and the one-step update
//! `Ψ(t + 2Δt) = Λ^{−κ} Ŝ C_{−ζ} Ŝ C_ζ Λ^κ Ψ(t)`.
//!
//! Scalings: `Δt = ε`, `Δx = ε^{1−α}`, `κ = ε^α`, `θ = arccos(cκ)` and
//! `ζ = m cos(πκ) ε / sin θ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::field::{Spinor2, SpinorField};
use crate::mat2::Mat2;
use crate::profile::CProfile;

/// Physical parameters `(m, c)` plus the discretization `(ε, α)` and the
/// quantities they determine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub m: f64,
    pub profile: CProfile,
    pub epsilon: f64,
    pub alpha: f64,
    pub dt: f64,
    pub dx: f64,
    pub kappa: f64,
}

impl ScalingParams {
    pub fn new(m: f64, profile: CProfile, epsilon: f64, alpha: f64) -> Result<Self> {
        if !(m >= 0.0 && m.is_finite()) {
            return Err(WalkError::Domain(format!("mass must be >= 0, got {m}")));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(WalkError::Domain(format!(
                "epsilon must be in (0, 1], got {epsilon}"
            )));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(WalkError::Domain(format!(
                "alpha must be in [0, 1], got {alpha}"
            )));
        }
        Ok(Self {
            m,
            profile,
            epsilon,
            alpha,
            dt: epsilon,
            dx: epsilon.powf(1.0 - alpha),
            kappa: epsilon.powf(alpha),
        })
    }

    /// Duration of one walk step, `2Δt`.
    pub fn step_duration(&self) -> f64 {
        2.0 * self.dt
    }
}

/// `(θ, ζ)` at `(t, x)`.
pub fn derive_angles(params: &ScalingParams, t: f64, x: f64) -> Result<(f64, f64)> {
    let c = params.profile.sample(t, x)?;
    let ck = c * params.kappa;
    if ck > 1.0 {
        return Err(WalkError::Domain(format!("c·kappa = {ck} exceeds 1")));
    }
    let theta = ck.acos();
    if params.m == 0.0 {
        return Ok((theta, 0.0));
    }
    let s = theta.sin();
    if s == 0.0 {
        return Err(WalkError::SingularMass { t, x });
    }
    // (−1)^κ is read as cos(πκ) so that ζ stays real
    let zeta = params.m * (PI * params.kappa).cos() * params.epsilon / s;
    Ok((theta, zeta))
}

/// `C_ζ = [[−cos θ, e^{−iζ} sin θ], [e^{iζ} sin θ, cos θ]]`.
pub fn coin_matrix(theta: f64, zeta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    Mat2::new(
        Complex64::new(-c, 0.0),
        Complex64::from_polar(s, -zeta),
        Complex64::from_polar(s, zeta),
        Complex64::new(c, 0.0),
    )
}

fn check_speed(c: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&c) {
        return Err(WalkError::Domain(format!("c must be in [0, 1], got {c}")));
    }
    Ok(())
}

/// `Λ = ½ [[−f⁻, f⁺], [f⁺, f⁻]]` with `f^± = √(1−c) ± √(1+c)`, as printed
/// (Hadamard at `c = 1`, `σ_x` at `c = 0`).
pub fn lambda_matrix(c: f64) -> Result<Mat2> {
    check_speed(c)?;
    let (a, b) = ((1.0 - c).sqrt(), (1.0 + c).sqrt());
    let (fp, fm) = (a + b, a - b);
    Ok(Mat2::from_real(-0.5 * fm, 0.5 * fp, 0.5 * fp, 0.5 * fm))
}

/// Principal power of an involution with spectrum `{+1, −1}`:
/// `Π₊ + e^{iπκ} Π₋` with `Π± = (I ± Λ)/2`.
fn involution_power(lambda: Mat2, kappa: f64) -> Mat2 {
    let phase = Complex64::from_polar(1.0, PI * kappa);
    let one = Complex64::new(1.0, 0.0);
    Mat2::identity().scale((one + phase) * 0.5) + lambda.scale((one - phase) * 0.5)
}

/// `Λ^κ` of the printed matrix. Unitary for every real `κ`, with
/// `Λ⁰ = I`, `Λ¹ = Λ` and `Λ^{κ₁}Λ^{κ₂} = Λ^{κ₁+κ₂}`.
pub fn lambda_power(c: f64, kappa: f64) -> Result<Mat2> {
    Ok(involution_power(lambda_matrix(c)?, kappa))
}

/// `Λ` written in the `(ψ⁺, ψ⁻)` component order the shift and coin use,
/// i.e. `σ_x Λ σ_x`. The printed matrix lists the basis as `(v⁻, v⁺)`.
pub fn lambda_spinor(c: f64) -> Result<Mat2> {
    let x = Mat2::sigma_x();
    Ok(x * lambda_matrix(c)? * x)
}

/// `(σ_x Λ σ_x)^κ`, the conjugation actually applied by [`qw_step`].
pub fn lambda_spinor_power(c: f64, kappa: f64) -> Result<Mat2> {
    Ok(involution_power(lambda_spinor(c)?, kappa))
}

/// `(ŜΨ)_l = (ψ⁺_{l+1}, ψ⁻_{l−1})`.
pub fn shift_full(field: &SpinorField) -> SpinorField {
    let n = field.len() as isize;
    let s = field.sites();
    let out = (0..n)
        .map(|l| {
            Spinor2::new(
                s[(l + 1).rem_euclid(n) as usize].plus,
                s[(l - 1).rem_euclid(n) as usize].minus,
            )
        })
        .collect();
    field.with_sites(out)
}

/// Partial shift `(Ŝ⁺Ψ)_l = (ψ⁺_{l+1}, ψ⁻_l)`.
pub fn shift_plus(field: &SpinorField) -> SpinorField {
    partial_shift(field, 1, 0)
}

/// `(Ŝ⁺)†`: `(ψ⁺_{l−1}, ψ⁻_l)`.
pub fn shift_plus_adjoint(field: &SpinorField) -> SpinorField {
    partial_shift(field, -1, 0)
}

/// Partial shift `(Ŝ⁻Ψ)_l = (ψ⁺_l, ψ⁻_{l−1})`.
pub fn shift_minus(field: &SpinorField) -> SpinorField {
    partial_shift(field, 0, -1)
}

fn partial_shift(field: &SpinorField, plus_offset: isize, minus_offset: isize) -> SpinorField {
    let s = field.sites();
    let out = (0..field.len() as isize)
        .map(|l| {
            Spinor2::new(
                s[field.wrap(l + plus_offset)].plus,
                s[field.wrap(l + minus_offset)].minus,
            )
        })
        .collect();
    field.with_sites(out)
}

/// Multiply site `l` by `mats[l]`.
pub fn apply_pointwise(field: &SpinorField, mats: &[Mat2]) -> SpinorField {
    debug_assert_eq!(field.len(), mats.len());
    field.with_sites(
        field
            .sites()
            .iter()
            .zip(mats)
            .map(|(v, m)| m.apply(*v))
            .collect(),
    )
}

/// Per-site matrices of one step, frozen at the step's start time.
///
/// Coins sample `c` at the crossing midpoint `x_l + Δx/2`; `Λ^κ` samples the
/// cell center `x_l`.
#[derive(Debug, Clone)]
pub struct StepOperators {
    pub lambda: Vec<Mat2>,
    pub lambda_inv: Vec<Mat2>,
    pub coin: Vec<Mat2>,
    pub coin_conj: Vec<Mat2>,
}

impl StepOperators {
    pub fn build(params: &ScalingParams, n: usize, t: f64) -> Result<Self> {
        let dx = params.dx;
        let mut ops = StepOperators {
            lambda: Vec::with_capacity(n),
            lambda_inv: Vec::with_capacity(n),
            coin: Vec::with_capacity(n),
            coin_conj: Vec::with_capacity(n),
        };
        for l in 0..n {
            let x = l as f64 * dx;
            let c = params.profile.sample(t, x)?;
            let lam = lambda_spinor_power(c, params.kappa)?;
            let (theta, zeta) = derive_angles(params, t, x + 0.5 * dx)?;
            ops.lambda.push(lam);
            ops.lambda_inv.push(lam.adjoint());
            ops.coin.push(coin_matrix(theta, zeta));
            ops.coin_conj.push(coin_matrix(theta, -zeta));
        }
        Ok(ops)
    }

    /// Right to left: `Λ^κ`, `C_ζ`, `Ŝ`, `C_{−ζ}`, `Ŝ`, `Λ^{−κ}`.
    pub fn apply(&self, field: &SpinorField) -> SpinorField {
        let f = apply_pointwise(field, &self.lambda);
        let f = apply_pointwise(&f, &self.coin);
        let f = shift_full(&f);
        let f = apply_pointwise(&f, &self.coin_conj);
        let f = shift_full(&f);
        apply_pointwise(&f, &self.lambda_inv)
    }

    /// The same step with `Λ` replaced by the identity.
    pub fn apply_bare(&self, field: &SpinorField) -> SpinorField {
        let f = apply_pointwise(field, &self.coin);
        let f = shift_full(&f);
        let f = apply_pointwise(&f, &self.coin_conj);
        shift_full(&f)
    }
}

fn check_grid(field: &SpinorField, params: &ScalingParams) -> Result<()> {
    if (field.dx() - params.dx).abs() > 1e-12 * params.dx {
        return Err(WalkError::Grid(format!(
            "field dx {} does not match params dx {}",
            field.dx(),
            params.dx
        )));
    }
    Ok(())
}

/// Advance `field` from `t` to `t + 2Δt`.
pub fn qw_step(field: &SpinorField, params: &ScalingParams, t: f64) -> Result<SpinorField> {
    check_grid(field, params)?;
    Ok(StepOperators::build(params, field.len(), t)?.apply(field))
}

/// `steps` walk steps starting at `t0`. Operators are built once when the
/// profile cannot depend on time.
pub fn evolve(
    field: &SpinorField,
    params: &ScalingParams,
    t0: f64,
    steps: usize,
) -> Result<SpinorField> {
    check_grid(field, params)?;
    let time_independent = !matches!(params.profile, CProfile::Custom { .. });
    let mut psi = field.clone();
    if time_independent {
        let ops = StepOperators::build(params, field.len(), t0)?;
        for _ in 0..steps {
            psi = ops.apply(&psi);
        }
    } else {
        for j in 0..steps {
            let t = t0 + j as f64 * params.step_duration();
            psi = StepOperators::build(params, field.len(), t)?.apply(&psi);
        }
    }
    Ok(psi)
}

/// The 2×2 block `W(k) = Λ^{−κ} D(k) C_{−ζ} D(k) C_ζ Λ^κ`, `D(k) = diag(e^{ikΔx}, e^{−ikΔx})`,
/// by which [`qw_step`] multiplies a plane wave `e^{ikx}` of a homogeneous walk.
pub fn momentum_block(params: &ScalingParams, k: f64) -> Result<Mat2> {
    if !params.profile.is_homogeneous() {
        return Err(WalkError::Inhomogeneous);
    }
    let c = params.profile.sample(0.0, 0.0)?;
    let (theta, zeta) = derive_angles(params, 0.0, 0.0)?;
    let lam = lambda_spinor_power(c, params.kappa)?;
    let d = Mat2::diag(
        Complex64::from_polar(1.0, k * params.dx),
        Complex64::from_polar(1.0, -k * params.dx),
    );
    Ok(lam.adjoint() * d * coin_matrix(theta, -zeta) * d * coin_matrix(theta, zeta) * lam)
}
