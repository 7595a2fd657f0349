use thiserror::Error;

/// Errors raised by the walk, the reference solvers, the QCA and the harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    /// A parameter or a sampled value of the speed profile is outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// `m > 0` with `sin(theta) = 0`; only happens at `alpha = 0`, `c = 1`.
    #[error("singular mass angle at t={t}, x={x}: sin(theta) = 0 with m > 0")]
    SingularMass { t: f64, x: f64 },

    /// An operation that needs translation invariance received a varying profile.
    #[error("operation requires a homogeneous speed profile")]
    Inhomogeneous,

    /// Dense diagonalization requested beyond its size budget.
    #[error("dimension {dim} exceeds the dense budget of {max}")]
    Size { dim: usize, max: usize },

    /// The banded linear solve hit a singular pivot or produced non-finite values.
    #[error("banded solver failure: {0}")]
    Solver(String),

    /// Statevector simulation requested beyond the qubit budget.
    #[error("{qubits} qubits exceed the statevector budget of {max}")]
    Budget { qubits: usize, max: usize },

    /// Extraction found weight outside the one-particle sector.
    #[error("state has weight {weight:e} outside the one-particle sector")]
    Sector { weight: f64 },

    /// Slater orbitals drifted too far from orthonormality.
    #[error("orbital Gram deviation {deviation:e} exceeds tolerance")]
    Orthogonality { deviation: f64 },

    /// Fit input below the noise floor or otherwise unusable.
    #[error("degenerate fit: {0}")]
    Degenerate(String),

    /// Wavepacket too narrow for the grid.
    #[error("packet width {width} is below 4 dx = {min}")]
    Resolution { width: f64, min: f64 },

    /// Two fields or operators live on incompatible grids.
    #[error("grid mismatch: {0}")]
    Grid(String),
}

pub type Result<T> = std::result::Result<T, WalkError>;
