//! Continuum Dirac evolution `i∂_tΨ = (c σ_x (−i∂_x) − m σ_z) Ψ` on the ring.
//!
//! Fourier convention: the plane wave `e^{ikx}` is FFT mode `n` with
//! `k = 2πn/(N dx)`, `n ∈ [−N/2, N/2)`, so the Nyquist mode carries `k = −π/dx`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Result, WalkError};
use crate::field::{Spinor2, SpinorField};
use crate::hamiltonian::{default_cn_steps, lattice_hamiltonian_curved, CrankNicolson};
use crate::mat2::Mat2;
use crate::profile::CProfile;

/// Momentum of FFT bin `j` on a ring of `n` sites.
pub fn mode_momentum(j: usize, n: usize, dx: f64) -> f64 {
    let signed = if 2 * j < n {
        j as f64
    } else {
        j as f64 - n as f64
    };
    2.0 * PI * signed / (n as f64 * dx)
}

/// `H_D(k) = c k σ_x − m σ_z`.
pub fn dirac_block(c: f64, m: f64, k: f64) -> Mat2 {
    Mat2::sigma_x().scale((c * k).into()) - Mat2::sigma_z().scale(m.into())
}

/// Forward DFT of each component, unnormalized.
pub(crate) fn fft_components(field: &SpinorField) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(field.len());
    let mut p = field.plus();
    let mut q = field.minus();
    fft.process(&mut p);
    fft.process(&mut q);
    (p, q)
}

/// Inverse DFT of each component, scaled by `scale`.
pub(crate) fn ifft_components(
    mut p: Vec<Complex64>,
    mut q: Vec<Complex64>,
    dx: f64,
    scale: f64,
) -> Result<SpinorField> {
    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(p.len());
    ifft.process(&mut p);
    ifft.process(&mut q);
    let s = Complex64::new(scale, 0.0);
    let sites = p
        .into_iter()
        .zip(q)
        .map(|(a, b)| Spinor2::new(a * s, b * s))
        .collect();
    SpinorField::new(sites, dx)
}

/// Table of the per-mode blocks `e^{−i H_D(k) T}`.
#[derive(Debug, Clone)]
pub struct DiracPropagator {
    pub m: f64,
    pub c: f64,
    pub time: f64,
    dx: f64,
    blocks: Vec<Mat2>,
}

impl DiracPropagator {
    pub fn new(n: usize, dx: f64, m: f64, c: f64, time: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(WalkError::Domain(format!("c must be in [0, 1], got {c}")));
        }
        if !(m >= 0.0 && m.is_finite()) {
            return Err(WalkError::Domain(format!("mass must be >= 0, got {m}")));
        }
        if n < 2 || dx.is_nan() || dx <= 0.0 {
            return Err(WalkError::Domain(format!("bad grid: N={n}, dx={dx}")));
        }
        let blocks = (0..n)
            .map(|j| dirac_block(c, m, mode_momentum(j, n, dx)).expm_hermitian(time))
            .collect();
        Ok(Self {
            m,
            c,
            time,
            dx,
            blocks,
        })
    }

    pub fn blocks(&self) -> &[Mat2] {
        &self.blocks
    }

    pub fn apply(&self, field: &SpinorField) -> Result<SpinorField> {
        if field.len() != self.blocks.len() || (field.dx() - self.dx).abs() > 1e-12 * self.dx {
            return Err(WalkError::Grid(
                "field does not match the propagator grid".into(),
            ));
        }
        let (mut p, mut q) = fft_components(field);
        for ((a, b), u) in p.iter_mut().zip(q.iter_mut()).zip(&self.blocks) {
            let v = u.apply(Spinor2::new(*a, *b));
            *a = v.plus;
            *b = v.minus;
        }
        ifft_components(p, q, self.dx, 1.0 / field.len() as f64)
    }
}

/// `e^{−i H_D T} ψ0` for homogeneous `c`.
pub fn dirac_propagator(psi0: &SpinorField, m: f64, c: f64, time: f64) -> Result<SpinorField> {
    DiracPropagator::new(psi0.len(), psi0.dx(), m, c, time)?.apply(psi0)
}

/// Trigonometric interpolation onto `factor` times as many sites.
pub fn spectral_refine(field: &SpinorField, factor: usize) -> Result<SpinorField> {
    if factor == 0 {
        return Err(WalkError::Domain("refinement must be >= 1".into()));
    }
    let n = field.len();
    let nf = n * factor;
    let (p, q) = fft_components(field);
    let pad = |src: &[Complex64]| {
        let mut out = vec![Complex64::new(0.0, 0.0); nf];
        for (j, v) in src.iter().enumerate() {
            if factor > 1 && n.is_multiple_of(2) && j == n / 2 {
                // split the Nyquist coefficient between ±N/2
                out[n / 2] += v * 0.5;
                out[nf - n / 2] += v * 0.5;
            } else if 2 * j < n {
                out[j] = *v;
            } else {
                out[nf - (n - j)] = *v;
            }
        }
        out
    };
    ifft_components(pad(&p), pad(&q), field.dx() / factor as f64, 1.0 / n as f64)
}

/// Inverse of [`spectral_refine`]: keep the `n` lowest modes.
pub fn spectral_restrict(field: &SpinorField, n: usize) -> Result<SpinorField> {
    let nf = field.len();
    if n == 0 || !nf.is_multiple_of(n) {
        return Err(WalkError::Grid(format!(
            "cannot restrict {nf} sites to {n}"
        )));
    }
    let factor = nf / n;
    let (p, q) = fft_components(field);
    let fold = |src: &[Complex64]| {
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (j, slot) in out.iter_mut().enumerate() {
            if factor > 1 && n.is_multiple_of(2) && j == n / 2 {
                *slot = src[n / 2] + src[nf - n / 2];
            } else if 2 * j < n {
                *slot = src[j];
            } else {
                *slot = src[nf - (n - j)];
            }
        }
        out
    };
    ifft_components(
        fold(&p),
        fold(&q),
        field.dx() * factor as f64,
        1.0 / nf as f64,
    )
}

/// Continuum reference for a position-dependent `c`: refine spectrally,
/// evolve the curved lattice Hamiltonian (profile frozen at `t = 0`) with
/// Crank–Nicolson at `τ ≤ dx_fine/4`, restrict back.
pub fn curved_dirac_reference(
    psi0: &SpinorField,
    profile: &CProfile,
    m: f64,
    time: f64,
    refinement: usize,
) -> Result<SpinorField> {
    let fine = spectral_refine(psi0, refinement)?;
    let h = lattice_hamiltonian_curved(fine.len(), fine.dx(), m, profile, 0.0)?;
    if time == 0.0 {
        return Ok(psi0.clone());
    }
    let steps = default_cn_steps(fine.dx(), time);
    let cn = CrankNicolson::new(&h, time / steps as f64)?;
    let mut psi = fine;
    for _ in 0..steps {
        psi = cn.step(&psi)?;
    }
    let out = spectral_restrict(&psi, psi0.len())?;
    SpinorField::new(out.into_sites(), psi0.dx())
}
