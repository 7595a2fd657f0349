//! Two-component spinor fields on a periodic ring.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};

/// Amplitudes `(ψ⁺, ψ⁻)` at one site. `ψ⁺` is about to move left, `ψ⁻` right.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Spinor2 {
    pub plus: Complex64,
    pub minus: Complex64,
}

impl Spinor2 {
    pub const fn new(plus: Complex64, minus: Complex64) -> Self {
        Self { plus, minus }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.plus.norm_sqr() + self.minus.norm_sqr()
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Spinor2) -> Complex64 {
        self.plus.conj() * other.plus + self.minus.conj() * other.minus
    }

    pub fn scale(&self, s: Complex64) -> Spinor2 {
        Spinor2::new(self.plus * s, self.minus * s)
    }

    pub fn is_finite(&self) -> bool {
        self.plus.is_finite() && self.minus.is_finite()
    }
}

impl Add for Spinor2 {
    type Output = Spinor2;
    fn add(self, o: Spinor2) -> Spinor2 {
        Spinor2::new(self.plus + o.plus, self.minus + o.minus)
    }
}

impl Sub for Spinor2 {
    type Output = Spinor2;
    fn sub(self, o: Spinor2) -> Spinor2 {
        Spinor2::new(self.plus - o.plus, self.minus - o.minus)
    }
}

impl Mul<Complex64> for Spinor2 {
    type Output = Spinor2;
    fn mul(self, s: Complex64) -> Spinor2 {
        self.scale(s)
    }
}

/// Spinor field on a periodic ring of `N ≥ 2` sites with spacing `dx`.
///
/// Site `l` sits at `x_l = l·dx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinorField {
    sites: Vec<Spinor2>,
    dx: f64,
}

impl SpinorField {
    pub fn new(sites: Vec<Spinor2>, dx: f64) -> Result<Self> {
        if sites.len() < 2 {
            return Err(WalkError::Domain(format!(
                "a ring needs at least 2 sites, got {}",
                sites.len()
            )));
        }
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(WalkError::Domain(format!("dx must be positive, got {dx}")));
        }
        Ok(Self { sites, dx })
    }

    pub fn zeros(n: usize, dx: f64) -> Result<Self> {
        Self::new(vec![Spinor2::zero(); n], dx)
    }

    /// Unit-norm field supported on one site.
    pub fn delta(n: usize, dx: f64, site: usize, value: Spinor2) -> Result<Self> {
        let mut f = Self::zeros(n, dx)?;
        f.sites[site % n] = value;
        Ok(f)
    }

    /// Build from separate `ψ⁺` and `ψ⁻` arrays.
    pub fn from_components(plus: &[Complex64], minus: &[Complex64], dx: f64) -> Result<Self> {
        if plus.len() != minus.len() {
            return Err(WalkError::Grid("component lengths differ".into()));
        }
        let sites = plus
            .iter()
            .zip(minus)
            .map(|(&p, &m)| Spinor2::new(p, m))
            .collect();
        Self::new(sites, dx)
    }

    /// Interleaved layout `[ψ⁺_0, ψ⁻_0, ψ⁺_1, ψ⁻_1, …]`.
    pub fn from_interleaved(v: &[Complex64], dx: f64) -> Result<Self> {
        if !v.len().is_multiple_of(2) {
            return Err(WalkError::Grid("interleaved vector has odd length".into()));
        }
        let sites = v
            .chunks_exact(2)
            .map(|c| Spinor2::new(c[0], c[1]))
            .collect();
        Self::new(sites, dx)
    }

    pub fn to_interleaved(&self) -> Vec<Complex64> {
        self.sites.iter().flat_map(|s| [s.plus, s.minus]).collect()
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Ring circumference `N·dx`.
    pub fn length(&self) -> f64 {
        self.dx * self.sites.len() as f64
    }

    pub fn x(&self, l: usize) -> f64 {
        l as f64 * self.dx
    }

    pub fn sites(&self) -> &[Spinor2] {
        &self.sites
    }

    pub fn sites_mut(&mut self) -> &mut [Spinor2] {
        &mut self.sites
    }

    pub fn into_sites(self) -> Vec<Spinor2> {
        self.sites
    }

    pub fn plus(&self) -> Vec<Complex64> {
        self.sites.iter().map(|s| s.plus).collect()
    }

    pub fn minus(&self) -> Vec<Complex64> {
        self.sites.iter().map(|s| s.minus).collect()
    }

    /// Site index with periodic wraparound.
    pub fn wrap(&self, l: isize) -> usize {
        l.rem_euclid(self.sites.len() as isize) as usize
    }

    /// Same grid, new values.
    pub fn with_sites(&self, sites: Vec<Spinor2>) -> SpinorField {
        debug_assert_eq!(sites.len(), self.sites.len());
        SpinorField { sites, dx: self.dx }
    }

    /// Vector 2-norm squared `Σ_l |ψ⁺_l|² + |ψ⁻_l|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.sites.iter().map(Spinor2::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> SpinorField {
        let n = self.norm();
        self.scale(Complex64::new(1.0 / n, 0.0))
    }

    pub fn scale(&self, s: Complex64) -> SpinorField {
        self.with_sites(self.sites.iter().map(|v| v.scale(s)).collect())
    }

    pub fn inner(&self, other: &SpinorField) -> Complex64 {
        self.sites
            .iter()
            .zip(&other.sites)
            .map(|(a, b)| a.inner(b))
            .sum()
    }

    /// `|ψ⁺_l|² + |ψ⁻_l|²` per site.
    pub fn density(&self) -> Vec<f64> {
        self.sites.iter().map(Spinor2::norm_sqr).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.sites.iter().all(Spinor2::is_finite)
    }

    fn check_same_grid(&self, other: &SpinorField) -> Result<()> {
        if self.len() != other.len() {
            return Err(WalkError::Grid(format!(
                "site counts differ: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }

    /// Discrete L² distance (vector 2-norm of the difference).
    pub fn l2_distance(&self, other: &SpinorField) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .sites
            .iter()
            .zip(&other.sites)
            .map(|(a, b)| (*a - *b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Largest componentwise modulus of the difference.
    pub fn max_distance(&self, other: &SpinorField) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .sites
            .iter()
            .zip(&other.sites)
            .map(|(a, b)| {
                let d = *a - *b;
                d.plus.norm().max(d.minus.norm())
            })
            .fold(0.0, f64::max))
    }

    /// Cyclic rotation: output site `l` holds input site `l − shift`.
    pub fn rotated(&self, shift: isize) -> SpinorField {
        let n = self.len();
        let sites = (0..n)
            .map(|l| self.sites[self.wrap(l as isize - shift)])
            .collect::<Vec<_>>();
        debug_assert_eq!(sites.len(), n);
        self.with_sites(sites)
    }
}
