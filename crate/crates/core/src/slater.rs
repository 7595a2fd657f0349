//! Free-fermion dynamics: a Slater determinant evolves by moving each of its
//! orbitals with the one-particle operator.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, WalkError};
use crate::field::SpinorField;
use crate::hamiltonian::{lattice_hamiltonian_curved, LatticeHamiltonian};
use crate::profile::CProfile;
use crate::qca::{QcaState, QUBIT_BUDGET};

/// Gram deviation above which orbitals are re-orthonormalized.
pub const REORTHO_TOL: f64 = 1e-10;
/// Gram deviation treated as a failure.
pub const ORTHO_FAIL_TOL: f64 = 1e-6;

/// Orthonormal orbitals `φ_1, …, φ_n` on a common ring. Mode `q = 2l + s`
/// of an orbital is component `s` at site `l`, the qubit numbering of the QCA.
#[derive(Debug, Clone, PartialEq)]
pub struct SlaterState {
    orbitals: Vec<SpinorField>,
}

impl SlaterState {
    pub fn new(orbitals: Vec<SpinorField>) -> Result<Self> {
        if orbitals.is_empty() {
            return Err(WalkError::Domain("need at least one orbital".into()));
        }
        let n = orbitals[0].len();
        if orbitals.iter().any(|o| o.len() != n) {
            return Err(WalkError::Grid("orbitals live on different grids".into()));
        }
        let s = Self { orbitals };
        let dev = s.gram_deviation();
        if dev > REORTHO_TOL {
            return Err(WalkError::Orthogonality { deviation: dev });
        }
        Ok(s)
    }

    pub fn orbitals(&self) -> &[SpinorField] {
        &self.orbitals
    }

    pub fn particles(&self) -> usize {
        self.orbitals.len()
    }

    pub fn modes(&self) -> usize {
        2 * self.orbitals[0].len()
    }

    /// `max |⟨φ_i, φ_j⟩ − δ_ij|`.
    pub fn gram_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.orbitals.iter().enumerate() {
            for (j, b) in self.orbitals.iter().enumerate() {
                let id = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.inner(b) - id).norm());
            }
        }
        worst
    }

    /// Modified Gram–Schmidt.
    fn reorthonormalize(&mut self) {
        for i in 0..self.orbitals.len() {
            for j in 0..i {
                let p = self.orbitals[j].inner(&self.orbitals[i]);
                let proj = self.orbitals[j].scale(p);
                let sites = self.orbitals[i]
                    .sites()
                    .iter()
                    .zip(proj.sites())
                    .map(|(a, b)| *a - *b)
                    .collect();
                self.orbitals[i] = self.orbitals[i].with_sites(sites);
            }
            self.orbitals[i] = self.orbitals[i].normalized();
        }
    }

    /// `⟨n_q⟩ = Σ_j |φ_j(q)|²` for every mode.
    pub fn occupations(&self) -> Vec<f64> {
        let mut occ = vec![0.0; self.modes()];
        for o in &self.orbitals {
            for (q, a) in o.to_interleaved().iter().enumerate() {
                occ[q] += a.norm_sqr();
            }
        }
        occ
    }

    /// `|det(A†B)|`, the modulus of the many-body overlap.
    pub fn overlap(&self, other: &SlaterState) -> Result<f64> {
        if self.particles() != other.particles() || self.modes() != other.modes() {
            return Err(WalkError::Grid("Slater states of different shape".into()));
        }
        let n = self.particles();
        let g = DMatrix::from_fn(n, n, |i, j| self.orbitals[i].inner(&other.orbitals[j]));
        Ok(g.determinant().norm())
    }

    /// Statevector `c†_{φ_1} ⋯ c†_{φ_n} |0⟩` with modes ordered `q_1 < q_2 < …`
    /// in each occupied basis state.
    pub fn to_qca_state(&self) -> Result<QcaState> {
        let modes = self.modes();
        if modes > QUBIT_BUDGET {
            return Err(WalkError::Budget {
                qubits: modes,
                max: QUBIT_BUDGET,
            });
        }
        let n = self.particles();
        let cols: Vec<Vec<Complex64>> = self.orbitals.iter().map(|o| o.to_interleaved()).collect();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << modes];
        for (idx, slot) in amps.iter_mut().enumerate() {
            if idx.count_ones() as usize != n {
                continue;
            }
            let occupied: Vec<usize> = (0..modes).filter(|q| idx >> q & 1 == 1).collect();
            *slot = DMatrix::from_fn(n, n, |r, j| cols[j][occupied[r]]).determinant();
        }
        QcaState::from_amplitudes(modes / 2, amps)
    }
}

/// Outcome of [`slater_evolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct SlaterEvolution {
    pub state: SlaterState,
    /// Steps after which the orbitals were re-orthonormalized.
    pub reorthonormalized_at: Vec<usize>,
}

/// Apply `step` to every orbital `steps` times.
pub fn slater_evolve<F>(orbitals: &SlaterState, step: F, steps: usize) -> Result<SlaterEvolution>
where
    F: Fn(&SpinorField) -> Result<SpinorField>,
{
    let mut s = orbitals.clone();
    let mut reortho = Vec::new();
    for j in 0..steps {
        s.orbitals = s.orbitals.iter().map(&step).collect::<Result<_>>()?;
        let dev = s.gram_deviation();
        if dev > ORTHO_FAIL_TOL {
            return Err(WalkError::Orthogonality { deviation: dev });
        }
        if dev > REORTHO_TOL {
            s.reorthonormalize();
            reortho.push(j + 1);
        }
    }
    Ok(SlaterEvolution {
        state: s,
        reorthonormalized_at: reortho,
    })
}

/// Single-particle matrix of the quadratic Fock Hamiltonian
/// `Σ H_{pq} c†_p c_q`; identical to the curved lattice Hamiltonian at `t = 0`.
pub fn kogut_susskind_matrix(
    n: usize,
    dx: f64,
    m: f64,
    profile: &CProfile,
) -> Result<LatticeHamiltonian> {
    lattice_hamiltonian_curved(n, dx, m, profile, 0.0)
}
