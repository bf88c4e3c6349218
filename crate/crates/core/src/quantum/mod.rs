//! GF(2) subspaces and dense state-vector simulation for up to 16 qubits.
//!
//! Basis index convention: coordinate 0 of a vector is the most significant bit
//! of its index, so `(1,0)` on two qubits is index 2, i.e. `|10>`.

mod state;
mod subspace;

pub use state::{fidelity, hadamard_all, measure_computational, subspace_state, Statevector};
pub use subspace::{dual, membership, random_subspace, Subspace};

pub const MAX_QUBITS: usize = 16;
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuantumError {
    #[error("vector has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{0} qubits exceeds the simulator limit of 16")]
    DimensionTooLarge(usize),
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(String),
    #[error("malformed subspace encoding: {0}")]
    Malformed(&'static str),
}
