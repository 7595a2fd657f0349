//! Plastic quantum walk: a discrete-spacetime Dirac scheme whose ε → 0 limit
//! is either lattice fermions or the Dirac equation depending on how `Δx`
//! scales with `Δt`, plus reference solvers, a convergence harness and the
//! multi-particle QCA.

pub mod banded;
pub mod dirac;
pub mod error;
pub mod field;
pub mod hamiltonian;
pub mod harness;
pub mod mat2;
pub mod profile;
pub mod qca;
pub mod slater;
pub mod walk;

pub use dirac::{curved_dirac_reference, dirac_propagator, DiracPropagator};
pub use error::{Result, WalkError};
pub use field::{Spinor2, SpinorField};
pub use hamiltonian::{
    evolve_crank_nicolson, evolve_exact, lattice_hamiltonian_curved, lattice_hamiltonian_flat,
    LatticeHamiltonian,
};
pub use harness::{
    dispersion_scan, estimate_order, make_wavepacket, run_convergence_sweep, Encoding,
    ExperimentSpec, Reference, SweepReport, Wavepacket,
};
pub use mat2::Mat2;
pub use profile::CProfile;
pub use qca::{
    embed_one_particle, extract_one_particle, gate_u, gate_v, qca_step, verify_encoding, Gate2Q,
    QcaState,
};
pub use slater::{kogut_susskind_matrix, slater_evolve, SlaterState};
pub use walk::{
    coin_matrix, derive_angles, evolve, lambda_matrix, lambda_power, lambda_spinor_power,
    momentum_block, qw_step, shift_full, ScalingParams,
};
