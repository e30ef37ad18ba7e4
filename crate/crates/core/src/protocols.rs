//! Measurement protocols for spin means and two-spin correlations.
//!
//! Hardware only measures qubits along z, so `S^x` and `S^y` are read out
//! by first rotating the spin so that the requested axis lands on z:
//!
//! ```text
//! S^x = e^{-iπ/2 S^y} S^z e^{iπ/2 S^y}      S^y = e^{iπ/2 S^x} S^z e^{-iπ/2 S^x}
//! ```
//!
//! Because `S^a = 1/2 Σ σ_i^a` and the single-qubit terms commute, each
//! rotation factorizes into one single-qubit gate per qubit of the spin.
//! After the rotation, the z-basis outcome distribution restricted to the
//! spin's qubits is grouped by Hamming weight `k = s - m`, which yields
//! `|C_m|^2`, and `<S^z> = Σ_m m |C_m|^2`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::sim::{run_circuit, sample_distribution, Circuit, Gate, ShotCounts, ShotRng, StateVector};
pub use crate::spin::{Axis, SpinRegister};

/// How an estimate was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateMode {
    Exact,
    Sampled { shots: u64 },
}

/// A measured quantity with its standard error (zero in exact mode).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub mode: EstimateMode,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            stderr: 0.0,
            mode: EstimateMode::Exact,
        }
    }

    pub fn shots(&self) -> Option<u64> {
        match self.mode {
            EstimateMode::Exact => None,
            EstimateMode::Sampled { shots } => Some(shots),
        }
    }
}

/// Eigenvalue convention for a register's z readout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Observable {
    /// Eigenvalues `m` of `S^z`.
    #[default]
    Spin,
    /// Eigenvalues `2m` of `Σ σ_i^z`; for a spin-1/2 this is the Pauli
    /// operator with eigenvalues ±1.
    Pauli,
}

impl Observable {
    fn factor(self) -> f64 {
        match self {
            Observable::Spin => 1.0,
            Observable::Pauli => 2.0,
        }
    }
}

/// One side of a correlation: which spin, which component, which scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Probe {
    pub register: SpinRegister,
    pub axis: Axis,
    pub observable: Observable,
}

impl Probe {
    pub fn new(register: SpinRegister, axis: Axis) -> Self {
        Self {
            register,
            axis,
            observable: Observable::Spin,
        }
    }

    pub fn pauli(register: SpinRegister, axis: Axis) -> Self {
        Self {
            register,
            axis,
            observable: Observable::Pauli,
        }
    }

    /// Eigenvalue attached to excitation count `k`.
    fn eigenvalue(&self, k: usize) -> f64 {
        self.observable.factor() * self.register.spin().projection_for(k).value()
    }
}

/// Pre-measurement rotation that maps `axis` onto z for `reg`.
///
/// x: `e^{iπ/2 S^y}` as `e^{iπ/4 σ^y}` on each qubit.
/// y: `e^{-iπ/2 S^x}` as `e^{-iπ/4 σ^x}` on each qubit.
/// z: nothing.
pub fn axis_rotation_fragment(reg: &SpinRegister, axis: Axis, n_qubits: usize) -> Result<Circuit> {
    reg.check_fits(n_qubits)?;
    let mut c = Circuit::new(n_qubits)?;
    for q in reg.qubits() {
        match axis {
            // e^{iπ/4 σ^y} = Ry(-π/2)
            Axis::X => c.push(Gate::ry(q, -FRAC_PI_2))?,
            // e^{-iπ/4 σ^x} = Rx(π/2)
            Axis::Y => c.push(Gate::rx(q, FRAC_PI_2))?,
            Axis::Z => break,
        };
    }
    Ok(c)
}

/// `base` followed by the rotation fragment of every probe.
pub fn measurement_circuit(base: &Circuit, probes: &[Probe]) -> Result<Circuit> {
    check_disjoint(probes)?;
    let mut c = base.clone();
    for p in probes {
        c.append(&axis_rotation_fragment(&p.register, p.axis, base.n_qubits())?)?;
    }
    Ok(c)
}

fn check_disjoint(probes: &[Probe]) -> Result<()> {
    for (i, a) in probes.iter().enumerate() {
        for b in &probes[i + 1..] {
            if a.register.overlaps(&b.register) {
                return Err(Error::domain(format!(
                    "registers at qubits {:?} and {:?} overlap",
                    a.register.qubits(),
                    b.register.qubits()
                )));
            }
        }
    }
    Ok(())
}

fn check_distribution(probs: &[f64]) -> Result<usize> {
    let dim = probs.len();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::domain(format!("distribution length {dim} is not a power of two")));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// `|C_m|^2` for `m = s, s-1, ..., -s`, by summing the probabilities of all
/// outcomes whose restriction to `reg` has `s - m` ones. Qubits outside the
/// register are marginalized.
pub fn magnetic_distribution(probs: &[f64], reg: &SpinRegister) -> Result<Vec<f64>> {
    let n = check_distribution(probs)?;
    reg.check_fits(n)?;
    let mut out = vec![0.0; reg.spin().multiplicity()];
    for (i, p) in probs.iter().enumerate() {
        out[reg.excitations_in(i, n)] += p;
    }
    Ok(out)
}

/// [`magnetic_distribution`] of the empirical frequencies in `counts`.
pub fn magnetic_distribution_from_counts(counts: &ShotCounts, reg: &SpinRegister) -> Result<Vec<f64>> {
    magnetic_distribution(&counts.frequencies(), reg)
}

/// Joint `P(m on a, m' on b)`, indexed by excitation counts `[k_a][k_b]`.
pub fn joint_magnetic_distribution(
    probs: &[f64],
    a: &SpinRegister,
    b: &SpinRegister,
) -> Result<Vec<Vec<f64>>> {
    let n = check_distribution(probs)?;
    a.check_fits(n)?;
    b.check_fits(n)?;
    if a.overlaps(b) {
        return Err(Error::domain("correlated registers overlap"));
    }
    let mut out = vec![vec![0.0; b.spin().multiplicity()]; a.spin().multiplicity()];
    for (i, p) in probs.iter().enumerate() {
        out[a.excitations_in(i, n)][b.excitations_in(i, n)] += p;
    }
    Ok(out)
}

/// Mean and standard error of a per-shot observable from its distribution.
/// For `shots = None` the estimate is exact; otherwise the variance of the
/// sample mean is the plug-in `(E[f^2] - E[f]^2) / shots`.
fn finish(weighted: impl Iterator<Item = (f64, f64)>, shots: Option<u64>) -> Estimate {
    let (mut mean, mut second) = (0.0, 0.0);
    for (p, f) in weighted {
        mean += p * f;
        second += p * f * f;
    }
    match shots {
        None => Estimate::exact(mean),
        Some(shots) => Estimate {
            value: mean,
            stderr: ((second - mean * mean).max(0.0) / shots as f64).sqrt(),
            mode: EstimateMode::Sampled { shots },
        },
    }
}

/// `Σ_m m |C_m|^2` (times 2 for [`Observable::Pauli`]) from a z-basis
/// distribution already rotated for the probe's axis.
pub fn mean_from_distribution(probs: &[f64], probe: &Probe, shots: Option<u64>) -> Result<Estimate> {
    let c = magnetic_distribution(probs, &probe.register)?;
    Ok(finish(
        c.iter().enumerate().map(|(k, &p)| (p, probe.eigenvalue(k))),
        shots,
    ))
}

/// Mean of a probe from shot counts taken after its rotation fragment.
pub fn mean_from_counts(counts: &ShotCounts, probe: &Probe) -> Result<Estimate> {
    mean_from_distribution(&counts.frequencies(), probe, Some(counts.shots()))
}

/// `Σ m m' P(m, m')` from a distribution rotated for both probes.
pub fn correlation_from_distribution(
    probs: &[f64],
    a: &Probe,
    b: &Probe,
    shots: Option<u64>,
) -> Result<Estimate> {
    let joint = joint_magnetic_distribution(probs, &a.register, &b.register)?;
    Ok(finish(
        joint.iter().enumerate().flat_map(|(ka, row)| {
            row.iter()
                .enumerate()
                .map(move |(kb, &p)| (p, a.eigenvalue(ka) * b.eigenvalue(kb)))
        }),
        shots,
    ))
}

pub fn correlation_from_counts(counts: &ShotCounts, a: &Probe, b: &Probe) -> Result<Estimate> {
    correlation_from_distribution(&counts.frequencies(), a, b, Some(counts.shots()))
}

fn rotated_probabilities(state: &StateVector, probes: &[Probe]) -> Result<Vec<f64>> {
    let n = state.n_qubits();
    let c = measurement_circuit(&Circuit::new(n)?, probes)?;
    Ok(run_circuit(&c, state)?.probabilities())
}

/// Exact `<S^axis>` of the spin in `reg`.
pub fn mean_component(state: &StateVector, reg: &SpinRegister, axis: Axis) -> Result<Estimate> {
    let probe = Probe::new(*reg, axis);
    mean_from_distribution(&rotated_probabilities(state, &[probe])?, &probe, None)
}

/// `<S^axis>` estimated from `shots` simulated measurements.
pub fn mean_component_sampled(
    state: &StateVector,
    reg: &SpinRegister,
    axis: Axis,
    shots: u64,
    rng: &mut ShotRng,
) -> Result<Estimate> {
    let probe = Probe::new(*reg, axis);
    let counts = sample_distribution(&rotated_probabilities(state, &[probe])?, shots, rng)?;
    mean_from_counts(&counts, &probe)
}

/// The three spin components and the length of the mean spin vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanVector {
    pub components: [Estimate; 3],
    pub magnitude: Estimate,
}

impl MeanVector {
    /// Combines three independently measured components. The magnitude's
    /// error is bounded by the error of the vector itself, `sqrt(Σ σ_a^2)`.
    pub fn from_components(components: [Estimate; 3]) -> Self {
        let value = components.iter().map(|e| e.value * e.value).sum::<f64>().sqrt();
        let stderr = components.iter().map(|e| e.stderr * e.stderr).sum::<f64>().sqrt();
        Self {
            components,
            magnitude: Estimate {
                value,
                stderr,
                mode: components[0].mode,
            },
        }
    }

    pub fn values(&self) -> [f64; 3] {
        self.components.map(|e| e.value)
    }
}

/// Exact mean spin vector of `reg`; each component is measured on its own
/// copy of the pre-measurement state.
pub fn mean_vector(state: &StateVector, reg: &SpinRegister) -> Result<MeanVector> {
    let x = mean_component(state, reg, Axis::X)?;
    let y = mean_component(state, reg, Axis::Y)?;
    let z = mean_component(state, reg, Axis::Z)?;
    Ok(MeanVector::from_components([x, y, z]))
}

/// Exact two-spin correlation `<A^a B^b>`.
pub fn correlation(state: &StateVector, a: &Probe, b: &Probe) -> Result<Estimate> {
    let probs = rotated_probabilities(state, &[*a, *b])?;
    correlation_from_distribution(&probs, a, b, None)
}

/// Sampled two-spin correlation.
pub fn correlation_sampled(
    state: &StateVector,
    a: &Probe,
    b: &Probe,
    shots: u64,
    rng: &mut ShotRng,
) -> Result<Estimate> {
    let probs = rotated_probabilities(state, &[*a, *b])?;
    let counts = sample_distribution(&probs, shots, rng)?;
    correlation_from_counts(&counts, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::DenseOperator;
    use crate::sim::{shot_rng, GateKind};
    use crate::spin::{collective_operator, dicke_state, SpinValue};
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn spin(t: u32) -> SpinValue {
        SpinValue::from_twice(t).unwrap()
    }

    /// Dense unitary of a circuit, column by column through the simulator.
    fn circuit_unitary(c: &Circuit) -> DenseOperator {
        let dim = 1 << c.n_qubits();
        let mut u = DenseOperator::zeros(dim);
        for col in 0..dim {
            let out = run_circuit(c, &StateVector::basis(c.n_qubits(), col).unwrap()).unwrap();
            for (row, a) in out.amplitudes().iter().enumerate() {
                u.set(row, col, *a);
            }
        }
        u
    }

    #[test]
    fn z_fragment_is_empty_and_xy_have_one_gate_per_qubit() {
        for t in 1..=4 {
            let reg = SpinRegister::new(spin(t), 0);
            let n = t as usize;
            assert!(axis_rotation_fragment(&reg, Axis::Z, n).unwrap().is_empty());
            for axis in [Axis::X, Axis::Y] {
                let f = axis_rotation_fragment(&reg, axis, n).unwrap();
                assert_eq!(f.len(), n);
                assert_eq!(f.count(GateKind::Single), n);
            }
        }
    }

    #[test]
    fn x_fragment_rotates_plus_onto_zero() {
        let reg = SpinRegister::new(SpinValue::HALF, 0);
        let plus = StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]).unwrap();
        let f = axis_rotation_fragment(&reg, Axis::X, 1).unwrap();
        let out = run_circuit(&f, &plus).unwrap();
        assert!((out.amplitude(0).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fragments_conjugate_sz_onto_axis() {
        for t in 1..=3 {
            let s = spin(t);
            let reg = SpinRegister::new(s, 0);
            let sz = collective_operator(s, Axis::Z).unwrap();
            for axis in [Axis::X, Axis::Y] {
                let r = circuit_unitary(&axis_rotation_fragment(&reg, axis, t as usize).unwrap());
                let conj = &(&r.adjoint() * &sz) * &r;
                let target = collective_operator(s, axis).unwrap();
                assert!((&conj - &target).max_abs() < 1e-12, "s={s} {axis:?}");
            }
        }
    }

    #[test]
    fn aggregation_rules() {
        let reg = SpinRegister::new(SpinValue::ONE, 0);
        let counts = ShotCounts::from_bitstrings([("00", 1024)]).unwrap();
        assert_eq!(magnetic_distribution_from_counts(&counts, &reg).unwrap(), vec![1.0, 0.0, 0.0]);
        let p = magnetic_distribution(&[0.0, 0.3, 0.2, 0.5], &reg).unwrap();
        assert!((p[0] - 0.0).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15 && (p[2] - 0.5).abs() < 1e-15);
        let reg3 = SpinRegister::new(spin(3), 0);
        let p = magnetic_distribution(&[0.125; 8], &reg3).unwrap();
        assert_eq!(p, vec![0.125, 0.375, 0.375, 0.125]);
    }

    #[test]
    fn aggregation_marginalizes_spectators() {
        // spin-1 on qubits 1..3 of a 3-qubit register
        let reg = SpinRegister::new(SpinValue::ONE, 1);
        let mut probs = vec![0.0; 8];
        probs[0b000] = 0.1;
        probs[0b100] = 0.2; // spectator excited, register |00>
        probs[0b011] = 0.7;
        let p = magnetic_distribution(&probs, &reg).unwrap();
        assert!((p[0] - 0.3).abs() < 1e-15);
        assert!((p[2] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn dicke_means() {
        let s = SpinValue::ONE;
        let reg = SpinRegister::new(s, 0);
        let up = dicke_state(s, s.m(2).unwrap()).unwrap();
        assert!((mean_component(&up, &reg, Axis::Z).unwrap().value - 1.0).abs() < 1e-12);
        let v = mean_vector(&up, &reg).unwrap();
        let vals = v.values();
        assert!(vals[0].abs() < 1e-12 && vals[1].abs() < 1e-12 && (vals[2] - 1.0).abs() < 1e-12);
        assert!((v.magnitude.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_state_pauli_correlation() {
        let a = SpinRegister::new(SpinValue::ONE, 0);
        let b = SpinRegister::new(SpinValue::HALF, 2);
        let st = StateVector::zero(3).unwrap();
        let e = correlation(&st, &Probe::new(a, Axis::Z), &Probe::pauli(b, Axis::Z)).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn overlapping_registers_rejected() {
        let a = SpinRegister::new(SpinValue::ONE, 0);
        let b = SpinRegister::new(SpinValue::ONE, 1);
        let st = StateVector::zero(3).unwrap();
        assert!(correlation(&st, &Probe::new(a, Axis::Z), &Probe::new(b, Axis::Z)).is_err());
    }

    #[test]
    fn sampled_estimate_has_positive_stderr() {
        let s = SpinValue::ONE;
        let reg = SpinRegister::new(s, 0);
        let st = dicke_state(s, s.m(0).unwrap()).unwrap();
        let mut rng = shot_rng(5, 0);
        let e = mean_component_sampled(&st, &reg, Axis::X, 1024, &mut rng).unwrap();
        assert_eq!(e.shots(), Some(1024));
        assert!(e.stderr > 0.0);
        assert!(e.value.abs() <= 5.0 * e.stderr);
    }

    #[test]
    fn counts_estimators_match_hand_computation() {
        // 600 x "00" (m=1), 400 x "11" (m=-1): mean 0.2, var = 1 - 0.04
        let reg = SpinRegister::new(SpinValue::ONE, 0);
        let counts = ShotCounts::from_bitstrings([("00", 600), ("11", 400)]).unwrap();
        let e = mean_from_counts(&counts, &Probe::new(reg, Axis::Z)).unwrap();
        assert!((e.value - 0.2).abs() < 1e-15);
        assert!((e.stderr - (0.96f64 / 1000.0).sqrt()).abs() < 1e-15);
    }
}
