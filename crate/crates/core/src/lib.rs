//! Block-wise commuting measurement groupings for Pauli Hamiltonians.
//!
//! Two Pauli strings k-commute when they commute on every block of a
//! partition of the qubits into contiguous blocks of size k. Grouping terms
//! under this relation interpolates between qubit-wise (k = 1) and full
//! (k = n) commutation, trading measurement count against circuit cost.

pub mod analysis;
pub mod clifford;
pub mod grouping;
pub mod hamiltonian;
pub mod pauli;

pub use analysis::{
    count_block_commuting, diag_gate_lower_bound, find_k_star, k_star_scaling, k_sweep,
    AnalysisError, Family, GateBound, KStarResult, ScalingRow, SweepRow, WeightRule,
};
pub use clifford::{diagonalize_group, CliffordCircuit, CliffordError, Gate, Tableau};
pub use grouping::{group_terms, r_hat, Grouping, GroupingError, InsertionOrder};
pub use hamiltonian::{Hamiltonian, HamiltonianError, LatticeOrdering, Term};
pub use pauli::{BlockSpec, Pauli, PauliError, PauliString};
