//! Closed-form dynamics of `n` qubits sharing a zero-temperature Lorentzian
//! bath in the single-excitation sector.
//!
//! The crate is organised bottom-up:
//!
//! * [`propagator`]: the superradiant survival amplitude `Φ(t)`, the bath
//!   memory kernel and the time-local decay rate used to classify
//!   CP-divisibility.
//! * [`sector`] and [`dfs`]: coupling profiles, single-excitation states,
//!   the superradiant state and the subradiant (decoherence-free) basis.
//! * [`evolution`]: amplitude evolution, reduced density matrices and the
//!   amplitude-damping channel on the `{ψ₊, |g…g⟩}` block.
//! * [`entanglement`]: partial transpose, negativities, the tripartite
//!   negativity bound `N*_CR`, two-qubit concurrence and biseparability
//!   times.
//! * [`oracle`]: independent numerical checks (ODE integration, a
//!   discretized bath, a separate negativity path).
//! * [`config`] and [`runner`]: JSON run configurations, figure presets and
//!   the table-producing scenarios behind the `collective-dfs` binary.

pub mod config;
pub mod dfs;
pub mod entanglement;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod oracle;
pub mod output;
pub mod propagator;
pub mod runner;
pub mod sector;

pub use dfs::{
    decompose, dfs_dimension, subradiant_basis, subradiant_pair, superradiant_state, verify_dark,
    DfsDecomposition,
};
pub use entanglement::{
    asymptotic_state, concurrence_two_qubit, find_tstar, ncr_star, negativity,
    partial_transpose, pure_sector_negativity, tripartite_negativity, EntanglementReport, TStar,
};
pub use error::{Error, Result};
pub use evolution::{
    canonical_decomposition, density_matrix, evolve, full_channel_consistency,
    initial_coefficients, kraus_apply, DensityMatrix, InitialFamily, Trajectory,
};
pub use propagator::{BathSpec, DecayRate, PropagatorParams};
pub use sector::{CouplingProfile, SectorState};

pub use num_complex::Complex64;
