use num_complex::Complex64;

use crate::error::{Error, Result};

/// Soft upper bound on register width. 2^24 amplitudes is 256 MiB.
pub const MAX_QUBITS: usize = 24;

/// Tolerance on `Σ|a|² = 1` accepted at construction.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Pure state over `n_qubits` qubits.
///
/// Basis index `i` is read with qubit 0 as the most significant bit, so
/// the ket label `|q0 q1 ... q_{n-1}>` is the binary expansion of `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

pub(crate) fn check_width(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::domain("a register needs at least one qubit"));
    }
    if n_qubits > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            n_qubits,
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

impl StateVector {
    /// `|0...0>`
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state with the given index.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_width(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::domain(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wraps an amplitude vector, rejecting non-power-of-two lengths and
    /// vectors whose norm is off by more than [`NORM_TOLERANCE`].
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let state = Self::from_raw(amps)?;
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::domain(format!(
                "state is not normalized (norm^2 = {norm})"
            )));
        }
        Ok(state)
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let mut state = Self::from_raw(amps)?;
        let norm = state.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::domain("cannot normalize a zero or non-finite vector"));
        }
        state.amps.iter_mut().for_each(|a| *a /= norm);
        Ok(state)
    }

    fn from_raw(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::domain(format!(
                "amplitude vector length {dim} is not a power of two >= 2"
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_width(n_qubits)?;
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|`, which is 1 exactly when the states agree up to a
    /// global phase.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// Largest entrywise distance after removing the relative global phase.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> Result<f64> {
        let ip = self.inner(other)?;
        let phase = if ip.norm() > 0.0 {
            ip / ip.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max))
    }

    /// Born-rule probabilities `|a_i|^2` in basis-index order.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Ket label of basis index `index`, qubit 0 leftmost.
    pub fn label(&self, index: usize) -> String {
        basis_label(index, self.n_qubits)
    }
}

/// Ket label of `index` on `n_qubits` qubits, qubit 0 leftmost.
pub fn basis_label(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|q| {
            if index >> (n_qubits - 1 - q) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Bit mask of `qubit` inside a basis index of an `n_qubits` register.
#[inline]
pub fn qubit_mask(qubit: usize, n_qubits: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

/// Exact measurement distribution of `state`.
pub fn exact_probabilities(state: &StateVector) -> Vec<f64> {
    state.probabilities()
}
