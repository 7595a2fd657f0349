//! Continuous-time references on the lattice: the flat and curved
//! lattice-fermion Hamiltonians and two integrators for `e^{−iHt}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::banded::{BandedLu, BandedMatrix};
use crate::error::{Result, WalkError};
use crate::field::{Spinor2, SpinorField};
use crate::mat2::Mat2;
use crate::profile::CProfile;

/// Largest `2N` handed to the dense eigensolver.
pub const DENSE_BUDGET: usize = 4096;

/// Nearest-neighbour spinor Hamiltonian on a periodic ring,
/// `(Hψ)_l = A_l ψ_{l−1} + B_l ψ_l + C_l ψ_{l+1}`.
///
/// Both off-diagonal blocks are stored, so Hermiticity is a property to check
/// rather than an assumption.
#[derive(Debug, Clone)]
pub struct LatticeHamiltonian {
    pub dx: f64,
    pub m: f64,
    pub profile: CProfile,
    pub t0: f64,
    lower: Vec<Mat2>,
    diag: Vec<Mat2>,
    upper: Vec<Mat2>,
}

fn check_grid(n: usize, dx: f64, m: f64) -> Result<()> {
    if n < 2 {
        return Err(WalkError::Domain(format!("N must be >= 2, got {n}")));
    }
    if !(dx > 0.0 && dx.is_finite()) {
        return Err(WalkError::Domain(format!("dx must be positive, got {dx}")));
    }
    if !(m >= 0.0 && m.is_finite()) {
        return Err(WalkError::Domain(format!("mass must be >= 0, got {m}")));
    }
    Ok(())
}

/// `(Hψ)_l = (ic/(2dx)) σ_x (ψ_{l−1} − ψ_{l+1}) − m σ_z ψ_l`.
pub fn lattice_hamiltonian_flat(n: usize, dx: f64, m: f64, c: f64) -> Result<LatticeHamiltonian> {
    if !(0.0..=1.0).contains(&c) {
        return Err(WalkError::Domain(format!("c must be in [0, 1], got {c}")));
    }
    lattice_hamiltonian_curved(n, dx, m, &CProfile::flat(c), 0.0)
}

/// `(Hψ)_l = (i/(2dx)) σ_x (c(t0, x_l − dx/2) ψ_{l−1} − c(t0, x_l + dx/2) ψ_{l+1}) − m σ_z ψ_l`.
pub fn lattice_hamiltonian_curved(
    n: usize,
    dx: f64,
    m: f64,
    profile: &CProfile,
    t0: f64,
) -> Result<LatticeHamiltonian> {
    check_grid(n, dx, m)?;
    let hop = Complex64::new(0.0, 0.5 / dx);
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for l in 0..n {
        let x = l as f64 * dx;
        let c_left = profile.sample(t0, x - 0.5 * dx)?;
        let c_right = profile.sample(t0, x + 0.5 * dx)?;
        lower.push(Mat2::sigma_x().scale(hop * c_left));
        upper.push(Mat2::sigma_x().scale(-hop * c_right));
    }
    Ok(LatticeHamiltonian {
        dx,
        m,
        profile: profile.clone(),
        t0,
        lower,
        diag: vec![Mat2::sigma_z().scale((-m).into()); n],
        upper,
    })
}

impl LatticeHamiltonian {
    pub fn sites(&self) -> usize {
        self.diag.len()
    }

    /// Hilbert-space dimension `2N`.
    pub fn dim(&self) -> usize {
        2 * self.sites()
    }

    fn check_field(&self, field: &SpinorField) -> Result<()> {
        if field.len() != self.sites() || (field.dx() - self.dx).abs() > 1e-12 * self.dx {
            return Err(WalkError::Grid(format!(
                "field ({} sites, dx {}) vs Hamiltonian ({} sites, dx {})",
                field.len(),
                field.dx(),
                self.sites(),
                self.dx
            )));
        }
        Ok(())
    }

    pub fn apply(&self, field: &SpinorField) -> Result<SpinorField> {
        self.check_field(field)?;
        let s = field.sites();
        let n = s.len();
        let out = (0..n)
            .map(|l| {
                let prev = s[(l + n - 1) % n];
                let next = s[(l + 1) % n];
                self.lower[l].apply(prev) + self.diag[l].apply(s[l]) + self.upper[l].apply(next)
            })
            .collect();
        Ok(field.with_sites(out))
    }

    /// Entry blocks `(H_{l,l−1}, H_{l,l}, H_{l,l+1})` of row `l`.
    pub fn blocks(&self, l: usize) -> (Mat2, Mat2, Mat2) {
        (self.lower[l], self.diag[l], self.upper[l])
    }

    /// Dense `2N × 2N` matrix in the interleaved ordering `2l + component`.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.sites();
        let mut h = DMatrix::zeros(2 * n, 2 * n);
        for l in 0..n {
            for (block, col) in [
                (self.lower[l], (l + n - 1) % n),
                (self.diag[l], l),
                (self.upper[l], (l + 1) % n),
            ] {
                let entries = [[block.a11, block.a12], [block.a21, block.a22]];
                for (a, row) in entries.iter().enumerate() {
                    for (b, v) in row.iter().enumerate() {
                        h[(2 * l + a, 2 * col + b)] += *v;
                    }
                }
            }
        }
        h
    }

    /// `max |H − H†|` over the dense matrix.
    pub fn hermiticity_residual(&self) -> f64 {
        let h = self.to_dense();
        let d = &h - h.adjoint();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `H(k)` for a homogeneous Hamiltonian acting on `e^{ikx}` spinors.
    pub fn momentum_block(&self, k: f64) -> Result<Mat2> {
        if !self.profile.is_homogeneous() {
            return Err(WalkError::Inhomogeneous);
        }
        let e = Complex64::from_polar(1.0, k * self.dx);
        Ok(self.lower[0].scale(e.conj()) + self.diag[0] + self.upper[0].scale(e))
    }

    /// `I + s·H` in banded form under the ring ordering of [`ring_positions`].
    fn shifted_banded(&self, s: Complex64) -> BandedMatrix {
        let n = self.sites();
        let mut a = BandedMatrix::zeros(2 * n, 5, 5);
        let pos = ring_positions(n);
        for l in 0..n {
            let rows = [
                (self.lower[l], (l + n - 1) % n),
                (self.diag[l], l),
                (self.upper[l], (l + 1) % n),
            ];
            for (block, col) in rows {
                let entries = [[block.a11, block.a12], [block.a21, block.a22]];
                for (a_i, row) in entries.iter().enumerate() {
                    for (b_i, v) in row.iter().enumerate() {
                        a.add(2 * pos[l] + a_i, 2 * pos[col] + b_i, s * *v);
                    }
                }
            }
            for comp in 0..2 {
                a.add(
                    2 * pos[l] + comp,
                    2 * pos[l] + comp,
                    Complex64::new(1.0, 0.0),
                );
            }
        }
        a
    }
}

/// Position of each ring site in the order `0, N−1, 1, N−2, …`, which keeps
/// every neighbour pair (including the wrap) within two positions.
fn ring_positions(n: usize) -> Vec<usize> {
    let mut pos = vec![0; n];
    for (p, slot) in (0..n)
        .map(|p| if p % 2 == 0 { p / 2 } else { n - 1 - p / 2 })
        .enumerate()
    {
        pos[slot] = p;
    }
    pos
}

/// Eigendecomposition of a Hermitian lattice Hamiltonian, reusable for any
/// evolution time.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    dx: f64,
    values: DVector<f64>,
    vectors: DMatrix<Complex64>,
}

impl SpectralPropagator {
    pub fn new(h: &LatticeHamiltonian) -> Result<Self> {
        if h.dim() > DENSE_BUDGET {
            return Err(WalkError::Size {
                dim: h.dim(),
                max: DENSE_BUDGET,
            });
        }
        let eig = h.to_dense().symmetric_eigen();
        Ok(Self {
            dx: h.dx,
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.values.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// `e^{−iHt} ψ`.
    pub fn propagate(&self, psi: &SpinorField, t: f64) -> Result<SpinorField> {
        if psi.len() * 2 != self.values.len() {
            return Err(WalkError::Grid(
                "field size does not match the Hamiltonian".into(),
            ));
        }
        let v = DVector::from_vec(psi.to_interleaved());
        let mut coeff = self.vectors.adjoint() * v;
        for (c, e) in coeff.iter_mut().zip(self.values.iter()) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        let out = &self.vectors * coeff;
        SpinorField::from_interleaved(out.as_slice(), self.dx)
    }
}

/// `e^{−iHT} ψ0` by dense diagonalization (`2N ≤ 4096`).
pub fn evolve_exact(h: &LatticeHamiltonian, psi0: &SpinorField, t: f64) -> Result<SpinorField> {
    h.check_field(psi0)?;
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    SpectralPropagator::new(h)?.propagate(psi0, t)
}

/// Crank–Nicolson stepper `(I + iHτ/2)^{−1}(I − iHτ/2)` with the left-hand
/// side factored once.
#[derive(Debug, Clone)]
pub struct CrankNicolson<'a> {
    h: &'a LatticeHamiltonian,
    tau: f64,
    lu: BandedLu,
    pos: Vec<usize>,
}

impl<'a> CrankNicolson<'a> {
    pub fn new(h: &'a LatticeHamiltonian, tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(WalkError::Domain(format!(
                "time step must be positive, got {tau}"
            )));
        }
        let lu = h.shifted_banded(Complex64::new(0.0, 0.5 * tau)).factor()?;
        Ok(Self {
            h,
            tau,
            lu,
            pos: ring_positions(h.sites()),
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn step(&self, psi: &SpinorField) -> Result<SpinorField> {
        let hpsi = self.h.apply(psi)?;
        let half = Complex64::new(0.0, -0.5 * self.tau);
        let mut b = vec![Complex64::new(0.0, 0.0); self.h.dim()];
        for (l, (v, hv)) in psi.sites().iter().zip(hpsi.sites()).enumerate() {
            b[2 * self.pos[l]] = v.plus + half * hv.plus;
            b[2 * self.pos[l] + 1] = v.minus + half * hv.minus;
        }
        self.lu.solve_in_place(&mut b)?;
        let sites = self
            .pos
            .iter()
            .map(|&p| Spinor2::new(b[2 * p], b[2 * p + 1]))
            .collect();
        Ok(psi.with_sites(sites))
    }
}

/// `steps` Crank–Nicolson steps of size `T/steps`.
pub fn evolve_crank_nicolson(
    h: &LatticeHamiltonian,
    psi0: &SpinorField,
    t: f64,
    steps: usize,
) -> Result<SpinorField> {
    h.check_field(psi0)?;
    if steps == 0 {
        return Err(WalkError::Domain(
            "Crank-Nicolson needs at least one step".into(),
        ));
    }
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    let cn = CrankNicolson::new(h, t / steps as f64)?;
    let mut psi = psi0.clone();
    for _ in 0..steps {
        psi = cn.step(&psi)?;
    }
    Ok(psi)
}

/// Default step count: `τ = min(dx/4, T/256)`.
pub fn default_cn_steps(dx: f64, t: f64) -> usize {
    let tau = (0.25 * dx).min(t.abs() / 256.0);
    if tau == 0.0 {
        return 1;
    }
    (t.abs() / tau).ceil().max(1.0) as usize
}
