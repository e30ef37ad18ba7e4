//! Statevector execution engine.

mod circuit;
mod gate;
mod sampling;
mod state;

pub use circuit::{apply_gate, run_circuit, Circuit};
pub(crate) use circuit::apply_gate_in_place;
pub use gate::{
    mat2_adjoint, mat2_mul, phase_invariant_fidelity, rz_matrix, sequence_matrix, sx_matrix,
    u3_decompose, u3_matrix, Gate, GateKind, Mat2,
};
pub use sampling::{sample_counts, sample_distribution, shot_rng, ShotCounts, ShotRng};
pub use state::{
    basis_label, exact_probabilities, qubit_mask, StateVector, MAX_QUBITS, NORM_TOLERANCE,
};
