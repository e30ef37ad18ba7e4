//! Spin-s as a block of `N = 2s` qubits.
//!
//! The collective operator `S = 1/2 Σ σ_i` over the block acts on the
//! symmetric (Dicke) subspace exactly like a single spin-s. Half-integers
//! are carried doubled (`twice_s`, `twice_m`) so basis bookkeeping is exact.

use std::fmt;
use std::ops::Range;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{check_dense_width, DenseOperator};
use crate::sim::{StateVector, NORM_TOLERANCE};

/// Residual bound for the algebraic identities.
pub const ALGEBRA_TOLERANCE: f64 = 1e-12;

/// Spin quantum number `s`, stored as `2s >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinValue {
    twice_s: u32,
}

impl SpinValue {
    pub const HALF: SpinValue = SpinValue { twice_s: 1 };
    pub const ONE: SpinValue = SpinValue { twice_s: 2 };

    pub fn from_twice(twice_s: u32) -> Result<Self> {
        if twice_s == 0 {
            return Err(Error::domain("spin must be at least 1/2"));
        }
        Ok(Self { twice_s })
    }

    pub fn twice_s(self) -> u32 {
        self.twice_s
    }

    pub fn value(self) -> f64 {
        self.twice_s as f64 / 2.0
    }

    /// Qubits in the encoding, `N = 2s`.
    pub fn qubit_count(self) -> usize {
        self.twice_s as usize
    }

    /// `2s + 1`
    pub fn multiplicity(self) -> usize {
        self.twice_s as usize + 1
    }

    pub fn m(self, twice_m: i32) -> Result<MagneticNumber> {
        let ts = self.twice_s as i32;
        if twice_m.abs() > ts || (ts - twice_m) % 2 != 0 {
            return Err(Error::domain(format!(
                "m = {}/2 is not a projection of s = {}/2",
                twice_m, self.twice_s
            )));
        }
        Ok(MagneticNumber { twice_m })
    }

    /// Projections in descending order `s, s-1, ..., -s`.
    pub fn projections(self) -> impl Iterator<Item = MagneticNumber> {
        let ts = self.twice_s as i32;
        (0..=ts).map(move |k| MagneticNumber { twice_m: ts - 2 * k })
    }

    /// Number of excited qubits (`|1>`) in the Dicke states of projection `m`.
    pub fn excitations(self, m: MagneticNumber) -> usize {
        ((self.twice_s as i32 - m.twice_m) / 2) as usize
    }

    /// Projection carried by Dicke states with `k` excitations.
    pub fn projection_for(self, k: usize) -> MagneticNumber {
        MagneticNumber {
            twice_m: self.twice_s as i32 - 2 * k as i32,
        }
    }
}

impl fmt::Display for SpinValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice_s.is_multiple_of(2) {
            write!(f, "{}", self.twice_s / 2)
        } else {
            write!(f, "{}/2", self.twice_s)
        }
    }
}

/// Projection `m`, stored as `2m`. Obtain through [`SpinValue::m`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MagneticNumber {
    twice_m: i32,
}

impl MagneticNumber {
    pub fn twice_m(self) -> i32 {
        self.twice_m
    }

    pub fn value(self) -> f64 {
        self.twice_m as f64 / 2.0
    }
}

/// Cartesian spin component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            _ => Err(Error::domain(format!("unknown axis {s:?}"))),
        }
    }
}

/// A spin occupying the contiguous qubits `first..first + 2s` of a circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpinRegister {
    spin: SpinValue,
    first: usize,
}

impl SpinRegister {
    pub fn new(spin: SpinValue, first: usize) -> Self {
        Self { spin, first }
    }

    pub fn spin(&self) -> SpinValue {
        self.spin
    }

    pub fn first(&self) -> usize {
        self.first
    }

    pub fn qubits(&self) -> Range<usize> {
        self.first..self.first + self.spin.qubit_count()
    }

    pub fn overlaps(&self, other: &SpinRegister) -> bool {
        let (a, b) = (self.qubits(), other.qubits());
        a.start < b.end && b.start < a.end
    }

    /// Fails if the register does not fit inside `n_qubits`.
    pub fn check_fits(&self, n_qubits: usize) -> Result<()> {
        let end = self.qubits().end;
        if end > n_qubits {
            return Err(Error::QubitOutOfRange {
                index: end - 1,
                n_qubits,
            });
        }
        Ok(())
    }

    /// Excitation count of the register's bits inside basis index `index`.
    #[inline]
    pub fn excitations_in(&self, index: usize, n_qubits: usize) -> usize {
        let n = self.spin.qubit_count();
        let shift = n_qubits - self.first - n;
        ((index >> shift) & ((1 << n) - 1)).count_ones() as usize
    }
}

/// Amplitudes `C_m` of a spin-s state, ordered `m = s, s-1, ..., -s`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinState {
    spin: SpinValue,
    amplitudes: Vec<Complex64>,
}

impl SpinState {
    pub fn new(spin: SpinValue, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != spin.multiplicity() {
            return Err(Error::DimensionMismatch {
                expected: spin.multiplicity(),
                got: amplitudes.len(),
            });
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::domain(format!(
                "spin state is not normalized (sum |C_m|^2 = {norm})"
            )));
        }
        Ok(Self { spin, amplitudes })
    }

    pub fn spin(&self) -> SpinValue {
        self.spin
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `|s, m>`: equal superposition of the `C(N, s-m)` bitstrings with `s - m`
/// ones.
pub fn dicke_state(spin: SpinValue, m: MagneticNumber) -> Result<StateVector> {
    let m = spin.m(m.twice_m)?;
    let n = spin.qubit_count();
    let k = spin.excitations(m);
    let amp = Complex64::new(binomial(n, k).sqrt().recip(), 0.0);
    let amps = (0..1usize << n)
        .map(|i| {
            if i.count_ones() as usize == k {
                amp
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    StateVector::from_amplitudes(amps)
}

/// `Σ_m C_m |s, m>` on `2s` qubits.
pub fn spin_state_to_statevector(state: &SpinState) -> Result<StateVector> {
    let spin = state.spin;
    let n = spin.qubit_count();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    let norms: Vec<f64> = (0..=n).map(|k| binomial(n, k).sqrt().recip()).collect();
    for (i, a) in amps.iter_mut().enumerate() {
        // amplitudes are indexed by k = s - m, the excitation count
        let k = i.count_ones() as usize;
        *a = state.amplitudes[k] * norms[k];
    }
    StateVector::from_amplitudes(amps)
}

/// `1/2 Σ_i σ_i^axis` over the `2s` qubits of the encoding.
///
/// The Pauli vector is `(σ^x, σ^y, σ^z)`; the third Cartesian component is
/// σ^z.
pub fn collective_operator(spin: SpinValue, axis: Axis) -> Result<DenseOperator> {
    let n = spin.qubit_count();
    check_dense_width(n)?;
    let dim = 1usize << n;
    let mut op = DenseOperator::zeros(dim);
    let half = 0.5;
    for col in 0..dim {
        for q in 0..n {
            let mask = 1 << (n - 1 - q);
            let bit_set = col & mask != 0;
            match axis {
                Axis::X => op.add_to(col ^ mask, col, Complex64::new(half, 0.0)),
                // σ^y|0> = i|1>, σ^y|1> = -i|0>
                Axis::Y => {
                    let v = if bit_set { -half } else { half };
                    op.add_to(col ^ mask, col, Complex64::new(0.0, v));
                }
                Axis::Z => {
                    let v = if bit_set { -half } else { half };
                    op.add_to(col, col, Complex64::new(v, 0.0));
                }
            }
        }
    }
    Ok(op)
}

/// `S·S = (S^x)^2 + (S^y)^2 + (S^z)^2`.
pub fn casimir_operator(spin: SpinValue) -> Result<DenseOperator> {
    let mut total = DenseOperator::zeros(1 << spin.qubit_count());
    for axis in Axis::ALL {
        let s = collective_operator(spin, axis)?;
        total = &total + &(&s * &s);
    }
    Ok(total)
}

/// Probability weight of `state` outside the symmetric subspace of `reg`,
/// `1 - Σ_m ||(<s,m| ⊗ I)|ψ>||^2`, clamped to `[0, 1]`.
pub fn singlet_leakage(state: &StateVector, reg: &SpinRegister) -> Result<f64> {
    let n_total = state.n_qubits();
    reg.check_fits(n_total)?;
    let n = reg.spin().qubit_count();
    let shift = n_total - reg.first() - n;
    let low_mask = (1usize << shift) - 1;
    let rest_dim = 1usize << (n_total - n);
    // projections onto each Dicke state, for every configuration of the
    // qubits outside the register
    let mut proj = vec![Complex64::new(0.0, 0.0); rest_dim * (n + 1)];
    for (i, a) in state.amplitudes().iter().enumerate() {
        let k = reg.excitations_in(i, n_total);
        let rest = ((i >> (shift + n)) << shift) | (i & low_mask);
        proj[rest * (n + 1) + k] += a;
    }
    let inside: f64 = proj
        .chunks(n + 1)
        .flat_map(|row| row.iter().enumerate())
        .map(|(k, c)| c.norm_sqr() / binomial(n, k))
        .sum();
    Ok((1.0 - inside).clamp(0.0, 1.0))
}

/// Worst residuals of the identities that make `2s` qubits a spin-s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgebraResiduals {
    pub spin: SpinValue,
    /// `max ||[S^a, S^b] - i ε_abc S^c||_max`
    pub commutator: f64,
    /// `max_m ||(S^2 - s(s+1)) |s,m>||`
    pub casimir: f64,
    /// `max_m ||(S^z - m) |s,m>||`
    pub sz_eigen: f64,
    /// `max |<s,m|s,m'> - δ_mm'|`
    pub orthonormality: f64,
    /// `max_{a,m}` norm of the part of `S^a |s,m>` outside the Dicke span.
    pub closure: f64,
    pub hermiticity: f64,
}

impl AlgebraResiduals {
    pub fn max(&self) -> f64 {
        [
            self.commutator,
            self.casimir,
            self.sz_eigen,
            self.orthonormality,
            self.closure,
            self.hermiticity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() < tol
    }
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Evaluates every spin identity for `spin` with dense operators.
pub fn algebra_residuals(spin: SpinValue) -> Result<AlgebraResiduals> {
    let ops = [
        collective_operator(spin, Axis::X)?,
        collective_operator(spin, Axis::Y)?,
        collective_operator(spin, Axis::Z)?,
    ];
    let i = Complex64::new(0.0, 1.0);

    let mut commutator: f64 = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            let lhs = ops[a].commutator(&ops[b]);
            let r = if a == b {
                lhs.max_abs()
            } else {
                let c = 3 - a - b;
                // ε_abc = +1 for cyclic (a, b, c)
                let sign = if (a + 1) % 3 == b { 1.0 } else { -1.0 };
                (&lhs - &ops[c].scale(i * sign)).max_abs()
            };
            commutator = commutator.max(r);
        }
    }

    let casimir_op = casimir_operator(spin)?;
    let s_val = spin.value();
    let dicke: Vec<(MagneticNumber, StateVector)> = spin
        .projections()
        .map(|m| dicke_state(spin, m).map(|v| (m, v)))
        .collect::<Result<_>>()?;

    let mut casimir: f64 = 0.0;
    let mut sz_eigen: f64 = 0.0;
    let mut orthonormality: f64 = 0.0;
    let mut closure: f64 = 0.0;
    for (m, v) in &dicke {
        let amps = v.amplitudes();
        let c: Vec<Complex64> = casimir_op
            .apply(amps)
            .iter()
            .zip(amps)
            .map(|(x, y)| x - y * (s_val * (s_val + 1.0)))
            .collect();
        casimir = casimir.max(vec_norm(&c));
        let z: Vec<Complex64> = ops[2]
            .apply(amps)
            .iter()
            .zip(amps)
            .map(|(x, y)| x - y * m.value())
            .collect();
        sz_eigen = sz_eigen.max(vec_norm(&z));
        for (m2, w) in &dicke {
            let ip = v.inner(w)?;
            let want = if m == m2 { 1.0 } else { 0.0 };
            orthonormality = orthonormality.max((ip - want).norm());
        }
        for op in &ops {
            let mut image = op.apply(amps);
            for (_, w) in &dicke {
                let coeff: Complex64 = w
                    .amplitudes()
                    .iter()
                    .zip(&image)
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                for (x, a) in image.iter_mut().zip(w.amplitudes()) {
                    *x -= coeff * a;
                }
            }
            closure = closure.max(vec_norm(&image));
        }
    }

    let hermiticity = ops
        .iter()
        .map(DenseOperator::hermiticity_residual)
        .fold(0.0, f64::max);

    Ok(AlgebraResiduals {
        spin,
        commutator,
        casimir,
        sz_eigen,
        orthonormality,
        closure,
        hermiticity,
    })
}
