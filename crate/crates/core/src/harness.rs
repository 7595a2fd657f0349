//! Convergence experiments: ε-sweeps of the walk against a reference
//! evolution, with error tables and fitted orders.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dirac::{curved_dirac_reference, dirac_propagator};
use crate::error::{Result, WalkError};
use crate::field::{Spinor2, SpinorField};
use crate::hamiltonian::{
    default_cn_steps, evolve_crank_nicolson, lattice_hamiltonian_curved, SpectralPropagator,
    DENSE_BUDGET,
};
use crate::mat2::Mat2;
use crate::profile::{periodic_offset, CProfile};
use crate::walk::{
    apply_pointwise, evolve, lambda_spinor_power, momentum_block, shift_plus, shift_plus_adjoint,
    ScalingParams,
};

/// Normalized Gaussian packet `exp(−d²/(4w²)) e^{ik0(x0 + d)}`, `d` the
/// periodic offset from `x0`, split as `√mix` into `ψ⁺` and `√(1 − mix)` into `ψ⁻`.
pub fn make_wavepacket(
    n: usize,
    dx: f64,
    x0: f64,
    w: f64,
    k0: f64,
    chirality_mix: f64,
) -> Result<SpinorField> {
    if !(0.0..=1.0).contains(&chirality_mix) {
        return Err(WalkError::Domain(format!(
            "chirality_mix must be in [0, 1], got {chirality_mix}"
        )));
    }
    if w.is_nan() || w < 4.0 * dx {
        return Err(WalkError::Resolution {
            width: w,
            min: 4.0 * dx,
        });
    }
    let length = n as f64 * dx;
    let (a, b) = (chirality_mix.sqrt(), (1.0 - chirality_mix).sqrt());
    let sites = (0..n)
        .map(|l| {
            let d = periodic_offset(l as f64 * dx - x0, length);
            let g = Complex64::from_polar((-d * d / (4.0 * w * w)).exp(), k0 * (x0 + d));
            Spinor2::new(g * a, g * b)
        })
        .collect();
    Ok(SpinorField::new(sites, dx)?.normalized())
}

/// Gaussian initial condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wavepacket {
    pub x0: f64,
    pub width: f64,
    pub k0: f64,
    pub chirality_mix: f64,
}

/// Reference evolution a sweep compares against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Reference {
    /// `e^{−iHt}` of the lattice Hamiltonian on the walk's own grid.
    LatticeExact,
    /// Exact continuum propagator in momentum space (homogeneous `c`).
    DiracMomentum,
    /// Curved lattice Hamiltonian on a grid refined by `refinement`.
    CurvedFineGrid { refinement: usize },
}

impl Reference {
    /// The natural reference for `alpha` and the profile.
    pub fn for_limit(alpha: f64, profile: &CProfile) -> Reference {
        if alpha == 1.0 {
            Reference::LatticeExact
        } else if profile.is_homogeneous() {
            Reference::DiracMomentum
        } else {
            Reference::CurvedFineGrid { refinement: 8 }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Reference::LatticeExact => "lattice-exact".into(),
            Reference::DiracMomentum => "dirac-momentum".into(),
            Reference::CurvedFineGrid { refinement } => format!("curved-fine-grid(x{refinement})"),
        }
    }
}

/// Frame in which the lattice reference is compared with the walk:
/// the reference state is `F e^{−iHt} F† ψ0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Encoding {
    /// `F = I`.
    None,
    /// `F = Ŝ⁺`, `(Ŝ⁺ψ)_l = (ψ⁺_{l+1}, ψ⁻_l)`.
    Shift,
    /// `F = Λ^{−κ} Ŝ⁺`.
    #[default]
    ShiftAndLambda,
}

/// One convergence experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub alpha: f64,
    pub m: f64,
    pub profile: CProfile,
    /// Ring circumference `L`.
    pub length: f64,
    /// Physical time `T`.
    pub time: f64,
    /// Requested ε values, strictly decreasing.
    pub epsilons: Vec<f64>,
    pub packet: Wavepacket,
    pub reference: Reference,
    /// Only used by [`Reference::LatticeExact`].
    #[serde(default)]
    pub encoding: Encoding,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(WalkError::Domain(format!(
                "alpha must be in [0, 1], got {}",
                self.alpha
            )));
        }
        if self.m.is_nan() || self.m < 0.0 {
            return Err(WalkError::Domain(format!("m must be >= 0, got {}", self.m)));
        }
        if !(self.length.is_finite()
            && self.length > 0.0
            && self.time.is_finite()
            && self.time > 0.0)
        {
            return Err(WalkError::Domain("length and time must be positive".into()));
        }
        if self.epsilons.is_empty() {
            return Err(WalkError::Domain("epsilon list is empty".into()));
        }
        for e in &self.epsilons {
            if !(*e > 0.0 && *e <= 1.0) {
                return Err(WalkError::Domain(format!(
                    "epsilon must be in (0, 1], got {e}"
                )));
            }
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(WalkError::Domain(
                "epsilons must be strictly decreasing".into(),
            ));
        }
        if self.reference == Reference::DiracMomentum && !self.profile.is_homogeneous() {
            return Err(WalkError::Inhomogeneous);
        }
        if let Reference::CurvedFineGrid { refinement } = self.reference {
            if refinement == 0 {
                return Err(WalkError::Domain("refinement must be >= 1".into()));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form (the label for custom profiles).
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).unwrap_or_else(|_| format!("{self:?}"));
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// Snap ε so that `N = L / ε^{1−α}` is an integer. Returns `(ε, N)`.
    pub fn snap_epsilon(&self, epsilon: f64) -> Result<(f64, usize)> {
        if self.alpha == 1.0 {
            let n = self.length.round();
            if (n - self.length).abs() > 1e-9 * self.length || n < 2.0 {
                return Err(WalkError::Grid(format!(
                    "alpha = 1 fixes dx = 1, so L = {} must be an integer >= 2",
                    self.length
                )));
            }
            return Ok((epsilon, n as usize));
        }
        let p = 1.0 - self.alpha;
        let mut n = (self.length / epsilon.powf(p)).round().max(2.0);
        // ε ≤ 1 needs dx ≤ 1
        if self.length / n > 1.0 {
            n = self.length.ceil();
        }
        let snapped = (self.length / n).powf(1.0 / p);
        Ok((snapped.min(1.0), n as usize))
    }
}

/// One ε of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub dt: f64,
    pub dx: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub steps: usize,
    /// `2ε·steps`, the time both evolutions reach.
    pub time_reached: f64,
    pub error_l2: f64,
    pub error_max: f64,
    pub walltime_s: f64,
}

/// ε changed to fit the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adjustment {
    pub requested_epsilon: f64,
    pub epsilon: f64,
    /// `|T − 2ε·steps|`.
    pub time_mismatch: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowFailure {
    pub epsilon: f64,
    pub error: String,
}

/// A fitted `error ≈ A ε^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    pub order: f64,
    /// Standard error of the slope.
    pub ci: f64,
}

/// Refined lattice reference against the momentum-space reference at the
/// smallest ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCheck {
    pub distance: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub spec_hash: String,
    pub version: String,
    pub profile: String,
    pub alpha: f64,
    pub m: f64,
    pub reference: String,
    pub encoding: Encoding,
    /// Sorted by descending ε.
    pub rows: Vec<SweepRow>,
    pub adjustments: Vec<Adjustment>,
    pub failures: Vec<RowFailure>,
    pub fit: Option<OrderFit>,
    /// Why no fit was produced, e.g. an exact (zero-error) sweep.
    pub fit_note: Option<String>,
    /// Errors never increase as ε decreases.
    pub monotone: bool,
    pub reference_check: Option<ReferenceCheck>,
}

impl SweepReport {
    pub fn fitted_order(&self) -> Option<f64> {
        self.fit.map(|f| f.order)
    }

    /// False if the reference cross-check ran and failed.
    pub fn reference_valid(&self) -> bool {
        self.reference_check.as_ref().is_none_or(|c| c.passed)
    }

    pub const CSV_HEADER: &'static str = "epsilon,dt,dx,N,steps,error_l2,error_max,walltime_s";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{},{},{:.16e},{:.16e},{:.16e}",
                r.epsilon, r.dt, r.dx, r.n, r.steps, r.error_l2, r.error_max, r.walltime_s
            );
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }
}

/// Least-squares slope of `log(error)` against `log(ε)`.
pub fn estimate_order(rows: &[(f64, f64)]) -> Result<OrderFit> {
    if rows.len() < 3 {
        return Err(WalkError::Degenerate(format!(
            "need at least 3 rows, got {}",
            rows.len()
        )));
    }
    if rows.windows(2).any(|w| w[1].0 >= w[0].0) {
        return Err(WalkError::Degenerate(
            "epsilons must be strictly decreasing".into(),
        ));
    }
    if let Some(&(e, err)) = rows.iter().find(|r| r.1.is_nan() || r.1 <= 1e-14) {
        return Err(WalkError::Degenerate(format!(
            "error {err:e} at epsilon {e} is at the noise floor (exact)"
        )));
    }
    let n = rows.len() as f64;
    let xs: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - icept - slope * x).powi(2))
        .sum();
    let ci = if rows.len() > 2 {
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(OrderFit { order: slope, ci })
}

/// `F ψ` for the chosen encoding.
fn encode(field: &SpinorField, lam_inv: &[Mat2], enc: Encoding) -> SpinorField {
    match enc {
        Encoding::None => field.clone(),
        Encoding::Shift => shift_plus(field),
        Encoding::ShiftAndLambda => apply_pointwise(&shift_plus(field), lam_inv),
    }
}

/// `F† ψ`.
fn decode(field: &SpinorField, lam: &[Mat2], enc: Encoding) -> SpinorField {
    match enc {
        Encoding::None => field.clone(),
        Encoding::Shift => shift_plus_adjoint(field),
        Encoding::ShiftAndLambda => shift_plus_adjoint(&apply_pointwise(field, lam)),
    }
}

struct RowOutcome {
    row: SweepRow,
    adjustment: Option<Adjustment>,
    /// Distance between the refined lattice and the row's reference.
    check: Option<f64>,
}

fn run_row(spec: &ExperimentSpec, requested: f64, cross_check: bool) -> Result<RowOutcome> {
    let (eps, n) = spec.snap_epsilon(requested)?;
    let params = ScalingParams::new(spec.m, spec.profile.clone(), eps, spec.alpha)?;
    let dx = params.dx;
    spec.profile.validate_on_grid(n, dx, 0.0)?;
    let steps = ((spec.time / (2.0 * eps)).round() as usize).max(1);
    let t = 2.0 * eps * steps as f64;
    let p = &spec.packet;
    let psi0 = make_wavepacket(n, dx, p.x0, p.width, p.k0, p.chirality_mix)?;

    let start = Instant::now();
    let walked = evolve(&psi0, &params, 0.0, steps)?;
    let reference = match spec.reference {
        Reference::LatticeExact => {
            let h = lattice_hamiltonian_curved(n, dx, spec.m, &spec.profile, 0.0)?;
            let mut lam = Vec::with_capacity(n);
            for l in 0..n {
                lam.push(lambda_spinor_power(
                    spec.profile.sample(0.0, l as f64 * dx)?,
                    params.kappa,
                )?);
            }
            let lam_inv: Vec<Mat2> = lam.iter().map(Mat2::adjoint).collect();
            let start_state = decode(&psi0, &lam, spec.encoding);
            let evolved = if h.dim() <= DENSE_BUDGET {
                SpectralPropagator::new(&h)?.propagate(&start_state, t)?
            } else {
                evolve_crank_nicolson(&h, &start_state, t, default_cn_steps(dx, t))?
            };
            encode(&evolved, &lam_inv, spec.encoding)
        }
        Reference::DiracMomentum => {
            dirac_propagator(&psi0, spec.m, spec.profile.sample(0.0, 0.0)?, t)?
        }
        Reference::CurvedFineGrid { refinement } => {
            curved_dirac_reference(&psi0, &spec.profile, spec.m, t, refinement)?
        }
    };
    let walltime = start.elapsed().as_secs_f64();
    let error_l2 = walked.l2_distance(&reference)?;
    let error_max = walked.max_distance(&reference)?;
    if !(error_l2.is_finite() && walked.is_finite()) {
        return Err(WalkError::Solver("non-finite result".into()));
    }

    let check = if cross_check {
        let fine = curved_dirac_reference(&psi0, &spec.profile, spec.m, t, 8)?;
        Some(fine.l2_distance(&reference)?)
    } else {
        None
    };

    let mismatch = (spec.time - t).abs();
    let adjustment = ((eps - requested).abs() > 1e-15 * requested || mismatch > 1e-12 * spec.time)
        .then_some(Adjustment {
            requested_epsilon: requested,
            epsilon: eps,
            time_mismatch: mismatch,
        });
    Ok(RowOutcome {
        row: SweepRow {
            epsilon: eps,
            dt: params.dt,
            dx,
            n,
            steps,
            time_reached: t,
            error_l2,
            error_max,
            walltime_s: walltime,
        },
        adjustment,
        check,
    })
}

/// Run every ε (in parallel), compare with the reference, fit the order.
///
/// Failing rows are recorded and skipped. For `α < 1` with the momentum
/// reference, the smallest-ε row is also checked against a ×8 refined
/// lattice evolution; the sweep is flagged invalid if they disagree by more
/// than a tenth of the smallest measured error.
pub fn run_convergence_sweep(spec: &ExperimentSpec) -> Result<SweepReport> {
    spec.validate()?;
    let cross_check = spec.alpha < 1.0 && spec.reference == Reference::DiracMomentum;
    let last = spec.epsilons.len() - 1;
    let outcomes: Vec<(f64, Result<RowOutcome>)> = spec
        .epsilons
        .par_iter()
        .enumerate()
        .map(|(i, &e)| (e, run_row(spec, e, cross_check && i == last)))
        .collect();

    let mut rows = Vec::new();
    let mut adjustments = Vec::new();
    let mut failures = Vec::new();
    let mut check = None;
    for (e, out) in outcomes {
        match out {
            Ok(o) => {
                if o.check.is_some() {
                    check = o.check;
                }
                adjustments.extend(o.adjustment);
                rows.push(o.row);
            }
            Err(err) => failures.push(RowFailure {
                epsilon: e,
                error: err.to_string(),
            }),
        }
    }
    if rows.windows(2).any(|w| w[1].epsilon >= w[0].epsilon) {
        return Err(WalkError::Grid("grid snapping merged two epsilons".into()));
    }
    let min_error = rows
        .iter()
        .map(|r| r.error_l2)
        .fold(f64::INFINITY, f64::min);
    let reference_check = check.map(|distance| {
        let threshold = min_error / 10.0;
        ReferenceCheck {
            distance,
            threshold,
            passed: distance <= threshold,
        }
    });
    let monotone = rows.windows(2).all(|w| w[1].error_l2 <= w[0].error_l2);
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.epsilon, r.error_l2)).collect();
    let (fit, fit_note) = match estimate_order(&pairs) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(SweepReport {
        spec_hash: spec.hash(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        profile: spec.profile.label(),
        alpha: spec.alpha,
        m: spec.m,
        reference: spec.reference.label(),
        encoding: spec.encoding,
        rows,
        adjustments,
        failures,
        fit,
        fit_note,
        monotone,
        reference_check,
    })
}

/// One momentum of a dispersion table. Energies are the positive branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionRow {
    pub k: f64,
    /// Eigenphases of `W(k)`, ascending.
    pub walk_phase: [f64; 2],
    /// `√(c² sin²(kΔx)/Δx² + m²)`.
    pub lattice_energy: f64,
    /// `√(c² k² + m²)`.
    pub continuum_energy: f64,
}

impl DispersionRow {
    /// `max |walk_phase ∓ 2ε E_lattice|` against the lattice branches.
    pub fn lattice_deviation(&self, epsilon: f64) -> f64 {
        let e = 2.0 * epsilon * self.lattice_energy;
        (self.walk_phase[0] + e)
            .abs()
            .max((self.walk_phase[1] - e).abs())
    }
}

/// Lattice dispersion `√(c² sin²(kΔx)/Δx² + m²)`.
pub fn lattice_energy(c: f64, m: f64, k: f64, dx: f64) -> f64 {
    let s = c * (k * dx).sin() / dx;
    (s * s + m * m).sqrt()
}

/// `k_count` momenta `k_j = −π/Δx + 2πj/(k_count Δx)` across the zone.
pub fn dispersion_scan(params: &ScalingParams, k_count: usize) -> Result<Vec<DispersionRow>> {
    if !params.profile.is_homogeneous() {
        return Err(WalkError::Inhomogeneous);
    }
    if k_count == 0 {
        return Err(WalkError::Domain("k_count must be >= 1".into()));
    }
    let c = params.profile.sample(0.0, 0.0)?;
    let dx = params.dx;
    (0..k_count)
        .map(|j| {
            let k = -PI / dx + 2.0 * PI * j as f64 / (k_count as f64 * dx);
            Ok(DispersionRow {
                k,
                walk_phase: momentum_block(params, k)?.eigenphases(),
                lattice_energy: lattice_energy(c, params.m, k, dx),
                continuum_energy: (c * c * k * k + params.m * params.m).sqrt(),
            })
        })
        .collect()
}
