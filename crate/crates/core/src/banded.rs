//! Complex banded LU with partial pivoting (the `gbtrf`/`gbtrs` scheme).

#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;

use crate::error::{Result, WalkError};

/// Square banded matrix with `kl` sub- and `ku` superdiagonals.
///
/// Row `i` stores columns `i − kl ..= i + ku + kl`; the extra `kl` columns
/// hold the fill-in created by row interchanges.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<Complex64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![Complex64::new(0.0, 0.0); n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let off = j as isize - i as isize + self.kl as isize;
        (off >= 0 && (off as usize) < self.width).then(|| i * self.width + off as usize)
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.slot(i, j)
            .map_or(Complex64::new(0.0, 0.0), |s| self.data[s])
    }

    /// Accumulate `v` into entry `(i, j)`, which must lie inside the band.
    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        let in_band = j + self.kl >= i && j <= i + self.ku;
        assert!(
            in_band && i < self.n && j < self.n,
            "entry ({i}, {j}) outside the band"
        );
        let s = self.slot(i, j).unwrap();
        self.data[s] += v;
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Factor in place. Fails on an exactly zero pivot or a non-finite entry.
    pub fn factor(mut self) -> Result<BandedLu> {
        let (n, kl) = (self.n, self.kl);
        let reach = self.ku + kl;
        let mut pivots = Vec::with_capacity(n);
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).norm();
            for i in k + 1..=last {
                let v = self.get(i, k).norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !best.is_finite() {
                return Err(WalkError::Solver(format!("non-finite entry in column {k}")));
            }
            if best == 0.0 {
                return Err(WalkError::Solver(format!("zero pivot in column {k}")));
            }
            pivots.push(p);
            let col_end = (k + reach).min(n - 1);
            if p != k {
                for j in k..=col_end {
                    let (a, b) = (self.slot(k, j).unwrap(), self.slot(p, j).unwrap());
                    self.data.swap(a, b);
                }
            }
            let pivot = self.get(k, k);
            for i in k + 1..=last {
                let s = self.slot(i, k).unwrap();
                let l = self.data[s] / pivot;
                self.data[s] = l;
                if l == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..=col_end {
                    let u = self.get(k, j);
                    let t = self.slot(i, j).unwrap();
                    self.data[t] -= l * u;
                }
            }
        }
        Ok(BandedLu { lu: self, pivots })
    }
}

/// Factorization produced by [`BandedMatrix::factor`], reusable for many
/// right-hand sides.
#[derive(Debug, Clone)]
pub struct BandedLu {
    lu: BandedMatrix,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn dim(&self) -> usize {
        self.lu.n
    }

    /// Overwrite `b` with `A⁻¹ b`.
    pub fn solve_in_place(&self, b: &mut [Complex64]) -> Result<()> {
        let a = &self.lu;
        let (n, kl) = (a.n, a.kl);
        if b.len() != n {
            return Err(WalkError::Grid(format!(
                "rhs length {} for dimension {n}",
                b.len()
            )));
        }
        for k in 0..n {
            b.swap(k, self.pivots[k]);
            let bk = b[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                b[i] -= a.get(i, k) * bk;
            }
        }
        let reach = a.ku + kl;
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in k + 1..=(k + reach).min(n - 1) {
                s -= a.get(k, j) * b[j];
            }
            b[k] = s / a.get(k, k);
        }
        if b.iter().any(|z| !z.is_finite()) {
            return Err(WalkError::Solver("solution is not finite".into()));
        }
        Ok(())
    }
}
