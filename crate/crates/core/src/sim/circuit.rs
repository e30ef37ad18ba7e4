use num_complex::Complex64;

use super::gate::{Gate, GateKind, Mat2};
use super::state::{check_width, qubit_mask, StateVector};
use crate::error::{Error, Result};

/// Registers at least this wide update amplitude pairs in parallel.
#[cfg(feature = "parallel")]
const PARALLEL_THRESHOLD: usize = 14;

/// Ordered gate list over a fixed number of qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        check_width(n_qubits)?;
        Ok(Self {
            n_qubits,
            gates: Vec::new(),
        })
    }

    pub fn from_gates(n_qubits: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Self::new(n_qubits)?;
        c.extend(gates)?;
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(self)
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<&mut Self> {
        for g in gates {
            self.push(g)?;
        }
        Ok(self)
    }

    /// Appends every gate of `other`, which must have the same width.
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(self)
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind() == kind).count()
    }
}

/// Applies `gate` to a copy of `state`.
pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    let mut out = state.clone();
    apply_gate_in_place(&mut out, gate)?;
    Ok(out)
}

/// Evolves `initial` through every gate of `circuit`.
pub fn run_circuit(circuit: &Circuit, initial: &StateVector) -> Result<StateVector> {
    if circuit.n_qubits() != initial.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: circuit.n_qubits(),
            got: initial.n_qubits(),
        });
    }
    let mut state = initial.clone();
    for g in circuit.gates() {
        apply_gate_in_place(&mut state, g)?;
    }
    Ok(state)
}

pub(crate) fn apply_gate_in_place(state: &mut StateVector, gate: &Gate) -> Result<()> {
    let n = state.n_qubits();
    gate.validate(n)?;
    match *gate {
        Gate::Id(_) => {}
        Gate::CX { control, target } => {
            apply_cx(
                state.amplitudes_mut(),
                qubit_mask(control, n),
                qubit_mask(target, n),
            );
        }
        _ => {
            let q = gate.qubits()[0];
            let m = gate.matrix().expect("single-qubit gate");
            apply_single(state.amplitudes_mut(), qubit_mask(q, n), &m);
        }
    }
    Ok(())
}

#[inline]
fn update_block(block: &mut [Complex64], stride: usize, m: &Mat2) {
    let (lo, hi) = block.split_at_mut(stride);
    for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
        let (x, y) = (*a0, *a1);
        *a0 = m[0][0] * x + m[0][1] * y;
        *a1 = m[1][0] * x + m[1][1] * y;
    }
}

/// Strided pair update: every block of `2*stride` amplitudes holds the
/// target-bit-0 half followed by the target-bit-1 half.
fn apply_single(amps: &mut [Complex64], stride: usize, m: &Mat2) {
    #[cfg(feature = "parallel")]
    if amps.len() >= 1 << PARALLEL_THRESHOLD {
        use rayon::prelude::*;
        amps.par_chunks_mut(2 * stride)
            .for_each(|block| update_block(block, stride, m));
        return;
    }
    for block in amps.chunks_mut(2 * stride) {
        update_block(block, stride, m);
    }
}

fn apply_cx(amps: &mut [Complex64], cmask: usize, tmask: usize) {
    for i in 0..amps.len() {
        if i & cmask != 0 && i & tmask == 0 {
            amps.swap(i, i | tmask);
        }
    }
}
