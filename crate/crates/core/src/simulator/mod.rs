//! Dense statevector engine.

pub mod gate;
pub mod layout;
pub mod measure;
pub mod state;

pub use crate::circuit::apply_circuit;
pub use gate::{apply_gate, Control, GateKind, GateOp, Pauli};
pub use layout::QubitLayout;
pub use measure::{marginal_probs, sample_bitstrings, sample_bitstrings_with};
pub use state::{fidelity, init_basis, Statevector, MAX_QUBITS};
pub use swap_test::{swap_test_estimate, swap_test_estimate_with, swap_test_p0};
