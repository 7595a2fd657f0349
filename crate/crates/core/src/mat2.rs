//! 2×2 complex matrices acting on the chirality degree of freedom.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::field::Spinor2;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Row-major 2×2 complex matrix `[[a11, a12], [a21, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl Mat2 {
    pub const fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn from_real(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self::new(a11.into(), a12.into(), a21.into(), a22.into())
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn sigma_x() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn sigma_y() -> Self {
        Self::new(ZERO, -I, I, ZERO)
    }

    pub fn sigma_z() -> Self {
        Self::new(ONE, ZERO, ZERO, -ONE)
    }

    pub fn diag(d1: Complex64, d2: Complex64) -> Self {
        Self::new(d1, ZERO, ZERO, d2)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn adjoint(&self) -> Self {
        Self::new(
            self.a11.conj(),
            self.a21.conj(),
            self.a12.conj(),
            self.a22.conj(),
        )
    }

    /// Entrywise complex conjugate (not transposed).
    pub fn conj(&self) -> Self {
        Self::new(
            self.a11.conj(),
            self.a12.conj(),
            self.a21.conj(),
            self.a22.conj(),
        )
    }

    pub fn trace(&self) -> Complex64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn apply(&self, v: Spinor2) -> Spinor2 {
        Spinor2::new(
            self.a11 * v.plus + self.a12 * v.minus,
            self.a21 * v.plus + self.a22 * v.minus,
        )
    }

    pub fn max_abs(&self) -> f64 {
        [self.a11, self.a12, self.a21, self.a22]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `max |(self - other)_ij|`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (*self - *other).max_abs()
    }

    /// `‖M†M − I‖_max`.
    pub fn unitarity_residual(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Mat2::identity())
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_residual() <= 1e-12
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_residual() <= 1e-12
    }

    /// Both eigenvalues, from the characteristic polynomial.
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let half_tr = self.trace() * 0.5;
        let disc = (half_tr * half_tr - self.det()).sqrt();
        [half_tr - disc, half_tr + disc]
    }

    /// Eigenphases `arg(λ)` in `(−π, π]`, sorted ascending.
    pub fn eigenphases(&self) -> [f64; 2] {
        let [l1, l2] = self.eigenvalues();
        let (p1, p2) = (l1.arg(), l2.arg());
        if p1 <= p2 {
            [p1, p2]
        } else {
            [p2, p1]
        }
    }

    /// `exp(−i H t)` for Hermitian `H = a0 I + a·σ`.
    pub fn expm_hermitian(&self, t: f64) -> Mat2 {
        let a0 = 0.5 * (self.a11.re + self.a22.re);
        let az = 0.5 * (self.a11.re - self.a22.re);
        let ax = 0.5 * (self.a12.re + self.a21.re);
        let ay = 0.5 * (self.a21.im - self.a12.im);
        let r = (ax * ax + ay * ay + az * az).sqrt();
        let phase = Complex64::from_polar(1.0, -a0 * t);
        let (s, c) = (r * t).sin_cos();
        // sin(r t)/r, with the r → 0 limit t
        let sinc = if r > 1e-300 { s / r } else { t };
        let n_sigma = Mat2::new(
            Complex64::new(az, 0.0),
            Complex64::new(ax, -ay),
            Complex64::new(ax, ay),
            Complex64::new(-az, 0.0),
        );
        (Mat2::identity().scale(c.into()) - n_sigma.scale(I * sinc)).scale(phase)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, b: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * b.a11 + self.a12 * b.a21,
            self.a11 * b.a12 + self.a12 * b.a22,
            self.a21 * b.a11 + self.a22 * b.a21,
            self.a21 * b.a12 + self.a22 * b.a22,
        )
    }
}

impl Mul<Spinor2> for Mat2 {
    type Output = Spinor2;

    fn mul(self, v: Spinor2) -> Spinor2 {
        self.apply(v)
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, b: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 + b.a11,
            self.a12 + b.a12,
            self.a21 + b.a21,
            self.a22 + b.a22,
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;

    fn sub(self, b: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 - b.a11,
            self.a12 - b.a12,
            self.a21 - b.a21,
            self.a22 - b.a22,
        )
    }
}
