//! Many-particle Plastic QCA on a ring of `N` cells, two qubits per cell.
//!
//! Qubit `2l` is the left-mover subcell of cell `l` (occupation of `ψ⁺_l`),
//! qubit `2l + 1` the right-mover subcell (`ψ⁻_l`). Basis index bit `q` is
//! the occupation of qubit `q`.
//!
//! One step applies, right to left, `U` on every P-pair, `V` on every Q-pair,
//! `U*` on every P-pair and `V` on every Q-pair. Q-pairs are the two subcells
//! of a cell; the P-pair `l` joins the right-mover of cell `l` to the
//! left-mover of cell `l + 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::field::{Spinor2, SpinorField};
use crate::mat2::Mat2;
use crate::walk::{apply_pointwise, coin_matrix, shift_full, shift_plus, shift_plus_adjoint};

/// Largest qubit count simulated as a statevector.
pub const QUBIT_BUDGET: usize = 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense statevector over `2N` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QcaState {
    cells: usize,
    amps: Vec<Complex64>,
}

fn check_budget(cells: usize) -> Result<()> {
    if 2 * cells > QUBIT_BUDGET {
        return Err(WalkError::Budget {
            qubits: 2 * cells,
            max: QUBIT_BUDGET,
        });
    }
    if cells < 2 {
        return Err(WalkError::Domain(format!(
            "a ring needs at least 2 cells, got {cells}"
        )));
    }
    Ok(())
}

impl QcaState {
    pub fn vacuum(cells: usize) -> Result<Self> {
        Self::basis(cells, 0)
    }

    pub fn basis(cells: usize, index: usize) -> Result<Self> {
        check_budget(cells)?;
        let mut amps = vec![ZERO; 1 << (2 * cells)];
        amps[index] = ONE;
        Ok(Self { cells, amps })
    }

    pub fn from_amplitudes(cells: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_budget(cells)?;
        if amps.len() != 1 << (2 * cells) {
            return Err(WalkError::Grid(format!(
                "{} amplitudes for {} qubits",
                amps.len(),
                2 * cells
            )));
        }
        Ok(Self { cells, amps })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn qubits(&self) -> usize {
        2 * self.cells
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨n_q⟩` for every qubit.
    pub fn occupations(&self) -> Vec<f64> {
        let mut occ = vec![0.0; self.qubits()];
        for (i, a) in self.amps.iter().enumerate() {
            let w = a.norm_sqr();
            if w == 0.0 {
                continue;
            }
            for (q, o) in occ.iter_mut().enumerate() {
                if i >> q & 1 == 1 {
                    *o += w;
                }
            }
        }
        occ
    }

    /// Probability of each total particle number.
    pub fn number_distribution(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.qubits() + 1];
        for (i, a) in self.amps.iter().enumerate() {
            d[i.count_ones() as usize] += a.norm_sqr();
        }
        d
    }

    /// Apply a two-qubit gate to `(a, b)`; `a` is the gate's first tensor
    /// factor. With `parity_mask`, the hopping entries `|01⟩ ↔ |10⟩` pick up
    /// the parity of the masked qubits (a Jordan–Wigner string).
    fn apply_gate(&mut self, gate: &Gate2Q, a: usize, b: usize, parity_mask: usize) {
        let (ba, bb) = (1usize << a, 1usize << b);
        let m = &gate.matrix;
        for i in 0..self.amps.len() {
            if i & (ba | bb) != 0 {
                continue;
            }
            let idx = [i, i | bb, i | ba, i | ba | bb];
            let v = idx.map(|j| self.amps[j]);
            let sign = if (i & parity_mask).count_ones() % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            for (r, &j) in idx.iter().enumerate() {
                let mut s = ZERO;
                for (col, x) in v.iter().enumerate() {
                    let hop = (r == 1 && col == 2) || (r == 2 && col == 1);
                    let e = if hop { m[r][col] * sign } else { m[r][col] };
                    s += e * x;
                }
                self.amps[j] = s;
            }
        }
    }
}

/// A 4×4 two-qubit gate in the basis `|00⟩, |01⟩, |10⟩, |11⟩` (first factor
/// is the high bit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate2Q {
    pub matrix: [[Complex64; 4]; 4],
}

impl Gate2Q {
    pub fn conj(&self) -> Gate2Q {
        Gate2Q {
            matrix: self.matrix.map(|row| row.map(|z| z.conj())),
        }
    }

    pub fn mul(&self, o: &Gate2Q) -> Gate2Q {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..4).map(|k| self.matrix[i][k] * o.matrix[k][j]).sum();
            }
        }
        Gate2Q { matrix: m }
    }

    pub fn adjoint(&self) -> Gate2Q {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.matrix[j][i].conj();
            }
        }
        Gate2Q { matrix: m }
    }

    pub fn unitarity_residual(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let mut r: f64 = 0.0;
        for (i, row) in p.matrix.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let id = if i == j { ONE } else { ZERO };
                r = r.max((v - id).norm());
            }
        }
        r
    }

    /// Largest entry coupling different occupation numbers.
    pub fn number_violation(&self) -> f64 {
        let weight = |i: usize| (i as u32).count_ones();
        let mut r: f64 = 0.0;
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if weight(i) != weight(j) {
                    r = r.max(v.norm());
                }
            }
        }
        r
    }

    /// The block on `span{|01⟩, |10⟩}`.
    pub fn one_particle_block(&self) -> Mat2 {
        let m = &self.matrix;
        Mat2::new(m[1][1], m[1][2], m[2][1], m[2][2])
    }
}

/// `V = |00⟩⟨00| + |01⟩⟨10| + |10⟩⟨01| − |11⟩⟨11|`, the fermionic swap.
pub fn gate_v() -> Gate2Q {
    let mut m = [[ZERO; 4]; 4];
    m[0][0] = ONE;
    m[1][2] = ONE;
    m[2][1] = ONE;
    m[3][3] = -ONE;
    Gate2Q { matrix: m }
}

/// `U = |00⟩⟨00| + e^{−iζ} sinθ |01⟩⟨01| − cosθ |01⟩⟨10| + cosθ |10⟩⟨01|
/// + e^{iζ} sinθ |10⟩⟨10| − |11⟩⟨11|`.
pub fn gate_u(theta: f64, zeta: f64) -> Gate2Q {
    gate_u_with(theta, zeta, Chirality::Standard, PairPhase::Printed)
}

/// Which hopping convention the `U` gate uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chirality {
    /// Real hopping `∓cosθ`.
    #[default]
    Standard,
    /// Hopping `−i cosθ` both ways; the massless limit commutes with `σ_y`.
    SigmaY,
}

/// Phase of `U` on the doubly occupied state `|11⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairPhase {
    /// `det` of the one-particle block (here `+1`), which makes `U` the
    /// second quantization of a one-particle unitary.
    #[default]
    FreeFermion,
    /// `−1`, as in the written-out gate. Adds a contact phase between two
    /// particles meeting at a crossing.
    Printed,
}

pub fn gate_u_with(theta: f64, zeta: f64, chirality: Chirality, phase: PairPhase) -> Gate2Q {
    let (s, c) = theta.sin_cos();
    let mut m = [[ZERO; 4]; 4];
    m[0][0] = ONE;
    m[1][1] = Complex64::from_polar(s, -zeta);
    m[2][2] = Complex64::from_polar(s, zeta);
    match chirality {
        Chirality::Standard => {
            m[1][2] = Complex64::new(-c, 0.0);
            m[2][1] = Complex64::new(c, 0.0);
        }
        Chirality::SigmaY => {
            m[1][2] = Complex64::new(0.0, -c);
            m[2][1] = Complex64::new(0.0, -c);
        }
    }
    let mut g = Gate2Q { matrix: m };
    g.matrix[3][3] = match phase {
        PairPhase::FreeFermion => g.one_particle_block().det(),
        PairPhase::Printed => -ONE,
    };
    g
}

/// Gate conventions for [`qca_step_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct QcaOptions {
    pub chirality: Chirality,
    pub pair_phase: PairPhase,
}

/// P-pair `l` as `(first factor, second factor)`: left-mover of cell `l + 1`,
/// right-mover of cell `l`.
fn p_pair(l: usize, cells: usize) -> (usize, usize) {
    ((2 * l + 2) % (2 * cells), 2 * l + 1)
}

/// One step with the default gates. `angles[l] = (θ, ζ)` at the crossing
/// between cells `l` and `l + 1`.
pub fn qca_step(state: &QcaState, angles: &[(f64, f64)]) -> Result<QcaState> {
    qca_step_with(state, angles, QcaOptions::default())
}

pub fn qca_step_with(
    state: &QcaState,
    angles: &[(f64, f64)],
    opts: QcaOptions,
) -> Result<QcaState> {
    let n = state.cells;
    check_budget(n)?;
    if angles.len() != n {
        return Err(WalkError::Grid(format!(
            "{} crossing angles for {n} cells",
            angles.len()
        )));
    }
    let u: Vec<Gate2Q> = angles
        .iter()
        .map(|&(t, z)| gate_u_with(t, z, opts.chirality, opts.pair_phase))
        .collect();
    let v = gate_v();
    // the wrap pair hops across every other qubit
    let wrap_mask = ((1usize << (2 * n)) - 1) & !1 & !(1 << (2 * n - 1));
    let mut s = state.clone();
    let p_layer = |s: &mut QcaState, conj: bool| {
        for (l, g) in u.iter().enumerate() {
            let (a, b) = p_pair(l, n);
            let mask = if l == n - 1 { wrap_mask } else { 0 };
            let g = if conj { g.conj() } else { *g };
            s.apply_gate(&g, a, b, mask);
        }
    };
    let q_layer = |s: &mut QcaState| {
        for l in 0..n {
            s.apply_gate(&v, 2 * l, 2 * l + 1, 0);
        }
    };
    p_layer(&mut s, false);
    q_layer(&mut s);
    p_layer(&mut s, true);
    q_layer(&mut s);
    Ok(s)
}

/// `ψ⁺_l ↦ |10⟩` at cell `l` (left-mover occupied), `ψ⁻_l ↦ |01⟩`.
pub fn embed_one_particle(psi: &SpinorField) -> Result<QcaState> {
    let mut s = QcaState::vacuum(psi.len())?;
    s.amps[0] = ZERO;
    for (l, v) in psi.sites().iter().enumerate() {
        s.amps[1 << (2 * l)] = v.plus;
        s.amps[1 << (2 * l + 1)] = v.minus;
    }
    Ok(s)
}

/// Inverse of [`embed_one_particle`]; fails if more than `1e−10` of the
/// weight lies outside the one-particle sector.
pub fn extract_one_particle(state: &QcaState, dx: f64) -> Result<SpinorField> {
    let outside: f64 = state
        .amps
        .iter()
        .enumerate()
        .filter(|(i, _)| i.count_ones() != 1)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    if outside > 1e-10 {
        return Err(WalkError::Sector { weight: outside });
    }
    let sites = (0..state.cells)
        .map(|l| Spinor2::new(state.amps[1 << (2 * l)], state.amps[1 << (2 * l + 1)]))
        .collect();
    SpinorField::new(sites, dx)
}

/// The one-particle operator the QCA realizes, `E† W E` with `E = Ŝ⁺` and
/// `W = Ŝ C_{−ζ} Ŝ C_ζ` (no `Λ`). `angles[l]` is the coin of site `l`.
pub fn encoded_walk_step(psi: &SpinorField, angles: &[(f64, f64)]) -> SpinorField {
    let coin: Vec<Mat2> = angles.iter().map(|&(t, z)| coin_matrix(t, z)).collect();
    let coin_conj: Vec<Mat2> = angles.iter().map(|&(t, z)| coin_matrix(t, -z)).collect();
    let f = shift_plus(psi);
    let f = apply_pointwise(&f, &coin);
    let f = shift_full(&f);
    let f = apply_pointwise(&f, &coin_conj);
    let f = shift_full(&f);
    shift_plus_adjoint(&f)
}

/// Largest deviation, over the one-particle basis of `N` cells, between the
/// QCA step and `E† W E`.
pub fn verify_encoding(theta: f64, zeta: f64, cells: usize) -> Result<f64> {
    verify_encoding_with(theta, zeta, cells, QcaOptions::default())
}

pub fn verify_encoding_with(theta: f64, zeta: f64, cells: usize, opts: QcaOptions) -> Result<f64> {
    let angles = vec![(theta, zeta); cells];
    let mut worst: f64 = 0.0;
    for l in 0..cells {
        for comp in 0..2 {
            let v = if comp == 0 {
                Spinor2::new(ONE, ZERO)
            } else {
                Spinor2::new(ZERO, ONE)
            };
            let psi = SpinorField::delta(cells, 1.0, l, v)?;
            let qca = extract_one_particle(
                &qca_step_with(&embed_one_particle(&psi)?, &angles, opts)?,
                1.0,
            )?;
            let walk = encoded_walk_step(&psi, &angles);
            worst = worst.max(qca.l2_distance(&walk)?);
        }
    }
    Ok(worst)
}

/// Builds the full step matrix column by column and returns the largest
/// entry connecting different particle numbers. Zero for a number-conserving
/// circuit.
pub fn number_conservation_residual(
    cells: usize,
    angles: &[(f64, f64)],
    opts: QcaOptions,
) -> Result<f64> {
    check_budget(cells)?;
    let dim = 1usize << (2 * cells);
    let mut worst: f64 = 0.0;
    for j in 0..dim {
        let col = qca_step_with(&QcaState::basis(cells, j)?, angles, opts)?;
        for (i, a) in col.amps.iter().enumerate() {
            if i.count_ones() != j.count_ones() {
                worst = worst.max(a.norm());
            }
        }
    }
    Ok(worst)
}
