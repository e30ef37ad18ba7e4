//! Probability-level noise: readout confusion, depolarizing gate errors and
//! the additive error budget.

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sim::{apply_gate_in_place, qubit_mask, Circuit, Gate, GateKind, StateVector};
use crate::spin::{singlet_leakage, SpinRegister};

/// Average device figures used by the noise model and the error budget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeviceParams {
    pub single_qubit_gate_error: f64,
    pub cx_gate_error: f64,
    pub readout_error: f64,
    pub shots: u64,
}

impl Default for DeviceParams {
    /// 0.047% single-qubit, 1.168% CX, 2.63% readout, 1024 shots.
    fn default() -> Self {
        Self {
            single_qubit_gate_error: 0.00047,
            cx_gate_error: 0.01168,
            readout_error: 0.0263,
            shots: 1024,
        }
    }
}

impl DeviceParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("single_qubit_gate_error", self.single_qubit_gate_error),
            ("cx_gate_error", self.cx_gate_error),
            ("readout_error", self.readout_error),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} = {v} is not a fraction in [0, 1]")));
            }
        }
        if self.shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        Ok(())
    }

    /// Parses flat `key = value` text. Blank lines and `#` comments are
    /// skipped; keys left out keep their default.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value, got {raw:?}", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: &dyn std::fmt::Display| {
                Error::Config(format!("line {}: {key}: {e}", lineno + 1))
            };
            match key {
                "single_qubit_gate_error" => p.single_qubit_gate_error = value.parse().map_err(|e| bad(&e))?,
                "cx_gate_error" => p.cx_gate_error = value.parse().map_err(|e| bad(&e))?,
                "readout_error" => p.readout_error = value.parse().map_err(|e| bad(&e))?,
                "shots" => p.shots = value.parse().map_err(|e| bad(&e))?,
                _ => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key {key:?}",
                        lineno + 1
                    )))
                }
            }
        }
        p.validate()?;
        Ok(p)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Rendered in the format [`DeviceParams::parse`] reads.
    pub fn to_text(&self) -> String {
        format!(
            "single_qubit_gate_error={}\ncx_gate_error={}\nreadout_error={}\nshots={}\n",
            self.single_qubit_gate_error, self.cx_gate_error, self.readout_error, self.shots
        )
    }

    pub fn depolarizing(&self) -> DepolarizingModel {
        DepolarizingModel::new(self.single_qubit_gate_error, self.cx_gate_error)
            .expect("validated fractions")
    }

    pub fn readout(&self, n_qubits: usize) -> ReadoutMatrix {
        ReadoutMatrix::symmetric(n_qubits, self.readout_error).expect("validated fraction")
    }
}

/// Per-qubit confusion matrices; `m[true_bit][reported_bit]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReadoutMatrix {
    per_qubit: Vec<[[f64; 2]; 2]>,
}

impl ReadoutMatrix {
    pub fn new(per_qubit: Vec<[[f64; 2]; 2]>) -> Result<Self> {
        for (q, m) in per_qubit.iter().enumerate() {
            for row in m {
                if row.iter().any(|v| !(0.0..=1.0).contains(v)) || (row[0] + row[1] - 1.0).abs() > 1e-12 {
                    return Err(Error::domain(format!(
                        "confusion matrix of qubit {q} is not row-stochastic: {m:?}"
                    )));
                }
            }
        }
        Ok(Self { per_qubit })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            per_qubit: vec![[[1.0, 0.0], [0.0, 1.0]]; n_qubits],
        }
    }

    /// Same flip probability `p` in both directions on every qubit.
    pub fn symmetric(n_qubits: usize, p: f64) -> Result<Self> {
        Self::new(vec![[[1.0 - p, p], [p, 1.0 - p]]; n_qubits])
    }

    pub fn n_qubits(&self) -> usize {
        self.per_qubit.len()
    }

    pub fn is_identity(&self) -> bool {
        self.per_qubit.iter().all(|m| m[0][1] == 0.0 && m[1][0] == 0.0)
    }
}

/// Pushes a distribution through independent per-qubit confusion.
pub fn apply_readout_noise(probs: &[f64], readout: &ReadoutMatrix) -> Result<Vec<f64>> {
    let n = readout.n_qubits();
    if probs.len() != 1 << n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            got: probs.len(),
        });
    }
    let mut out = probs.to_vec();
    for (q, m) in readout.per_qubit.iter().enumerate() {
        let mask = qubit_mask(q, n);
        for i in 0..out.len() {
            if i & mask != 0 {
                continue;
            }
            let (p0, p1) = (out[i], out[i | mask]);
            out[i] = p0 * m[0][0] + p1 * m[1][0];
            out[i | mask] = p0 * m[0][1] + p1 * m[1][1];
        }
    }
    Ok(out)
}

/// Error branches beyond this many faults are not tracked individually.
pub const DEFAULT_MAX_ORDER: u32 = 2;

/// Depolarizing error after every gate: with probability `rate` the touched
/// qubits are replaced by the maximally mixed state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DepolarizingModel {
    pub single: f64,
    pub cx: f64,
    pub max_order: u32,
}

impl DepolarizingModel {
    pub fn new(single: f64, cx: f64) -> Result<Self> {
        for r in [single, cx] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::domain(format!("depolarizing rate {r} is outside [0, 1]")));
            }
        }
        Ok(Self {
            single,
            cx,
            max_order: DEFAULT_MAX_ORDER,
        })
    }

    pub fn noiseless() -> Self {
        Self {
            single: 0.0,
            cx: 0.0,
            max_order: 0,
        }
    }

    pub fn with_max_order(mut self, max_order: u32) -> Self {
        self.max_order = max_order;
        self
    }

    fn rate(&self, gate: &Gate) -> f64 {
        match gate.kind() {
            GateKind::Single => self.single,
            GateKind::Cx => self.cx,
        }
    }
}

/// Result of a noisy run: the outcome distribution and the weighted pure
/// states it was assembled from.
#[derive(Clone, Debug)]
pub struct NoisyRun {
    pub probabilities: Vec<f64>,
    pub branches: Vec<(f64, StateVector)>,
    /// Mass of the branches with more than `max_order` faults, spread
    /// uniformly over all outcomes.
    pub truncated_mass: f64,
}

impl NoisyRun {
    /// Ensemble-averaged weight outside the symmetric subspace of `reg`.
    pub fn leakage(&self, reg: &SpinRegister) -> Result<f64> {
        let mut total = 0.0;
        for (w, s) in &self.branches {
            total += w * singlet_leakage(s, reg)?;
        }
        Ok(total)
    }
}

/// Runs `circuit` from `initial` under depolarizing noise by unfolding the
/// channel into weighted pure-state branches.
///
/// Full depolarization of `k` qubits equals the uniform average of the
/// `4^k` Pauli strings on them. The identity string is merged into the
/// fault-free branch, so a gate with rate `r` keeps the branch with weight
/// `1 - r + r/4^k` and spawns `4^k - 1` faulted copies of weight `r/4^k`.
/// Branches that would exceed `max_order` faults are dropped and their mass
/// is spread uniformly over the outcomes.
pub fn apply_depolarizing(
    circuit: &Circuit,
    initial: &StateVector,
    model: &DepolarizingModel,
) -> Result<NoisyRun> {
    if circuit.n_qubits() != initial.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: circuit.n_qubits(),
            got: initial.n_qubits(),
        });
    }
    let mut branches: Vec<(f64, u32, StateVector)> = vec![(1.0, 0, initial.clone())];
    let mut truncated = 0.0;
    for gate in circuit.gates() {
        let rate = model.rate(gate);
        for (_, _, s) in branches.iter_mut() {
            apply_gate_in_place(s, gate)?;
        }
        if rate == 0.0 {
            continue;
        }
        let qubits = gate.qubits();
        let strings = 1usize << (2 * qubits.len());
        let fault_weight = rate / strings as f64;
        let keep = 1.0 - rate + fault_weight;
        let mut spawned = Vec::new();
        for (w, order, s) in branches.iter_mut() {
            let parent = *w;
            *w *= keep;
            let faulted = parent * fault_weight * (strings - 1) as f64;
            if *order >= model.max_order {
                truncated += faulted;
                continue;
            }
            for code in 1..strings {
                let mut child = s.clone();
                for (slot, &q) in qubits.iter().enumerate() {
                    apply_pauli(&mut child, q, (code >> (2 * slot)) & 3)?;
                }
                spawned.push((parent * fault_weight, *order + 1, child));
            }
        }
        branches.extend(spawned);
    }
    let dim = initial.dim();
    let mut probabilities = vec![0.0; dim];
    for (w, _, s) in &branches {
        for (p, a) in probabilities.iter_mut().zip(s.amplitudes()) {
            *p += w * a.norm_sqr();
        }
    }
    if truncated > 0.0 {
        let u = truncated / dim as f64;
        probabilities.iter_mut().for_each(|p| *p += u);
    }
    Ok(NoisyRun {
        probabilities,
        branches: branches.into_iter().map(|(w, _, s)| (w, s)).collect(),
        truncated_mass: truncated,
    })
}

/// Pauli by code 0..4 = I, X, Y, Z, up to global phase (Y ∝ X·Z).
fn apply_pauli(state: &mut StateVector, qubit: usize, code: usize) -> Result<()> {
    match code {
        0 => {}
        1 => apply_gate_in_place(state, &Gate::X(qubit))?,
        2 => {
            apply_gate_in_place(state, &Gate::rz(qubit, PI))?;
            apply_gate_in_place(state, &Gate::X(qubit))?;
        }
        _ => apply_gate_in_place(state, &Gate::rz(qubit, PI))?,
    }
    Ok(())
}

/// Additive relative-error estimate, all parts in percent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorBudget {
    pub gates: f64,
    pub readout: f64,
    /// Counting statistics, `100 / √shots`.
    pub statistics: f64,
}

impl ErrorBudget {
    pub fn total(&self) -> f64 {
        self.gates + self.readout + self.statistics
    }

    /// Gate and readout parts only.
    pub fn systematic(&self) -> f64 {
        self.gates + self.readout
    }
}

/// `n_single·e1 + n_cx·e2 + n_measured·e_ro + 1/√shots`, in percent.
pub fn error_budget(
    n_single: usize,
    n_cx: usize,
    n_measured: usize,
    device: &DeviceParams,
) -> ErrorBudget {
    ErrorBudget {
        gates: 100.0 * (n_single as f64 * device.single_qubit_gate_error + n_cx as f64 * device.cx_gate_error),
        readout: 100.0 * n_measured as f64 * device.readout_error,
        statistics: 100.0 / (device.shots as f64).sqrt(),
    }
}

/// [`error_budget`] with the gate counts taken from a circuit.
pub fn circuit_error_budget(circuit: &Circuit, n_measured: usize, device: &DeviceParams) -> ErrorBudget {
    error_budget(
        circuit.count(GateKind::Single),
        circuit.count(GateKind::Cx),
        n_measured,
        device,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::run_circuit;
    use num_complex::Complex64;

    #[test]
    fn readout_identity_and_flip() {
        let p = vec![0.1, 0.2, 0.3, 0.4];
        assert_eq!(apply_readout_noise(&p, &ReadoutMatrix::identity(2)).unwrap(), p);
        let out = apply_readout_noise(&[1.0, 0.0], &ReadoutMatrix::symmetric(1, 0.1).unwrap()).unwrap();
        assert!((out[0] - 0.9).abs() < 1e-15 && (out[1] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn readout_two_flips() {
        let out = apply_readout_noise(&[1.0, 0.0, 0.0, 0.0], &ReadoutMatrix::symmetric(2, 0.0263).unwrap())
            .unwrap();
        assert!((out[3] - 0.0263 * 0.0263).abs() < 1e-15);
        assert!((out[3] - 6.9169e-4).abs() < 1e-12);
        assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn readout_asymmetric_per_qubit() {
        // qubit 0 never flips, qubit 1 reports 1 as 0 half the time
        let r = ReadoutMatrix::new(vec![[[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.5, 0.5]]]).unwrap();
        let out = apply_readout_noise(&[0.0, 1.0, 0.0, 0.0], &r).unwrap();
        assert_eq!(out, vec![0.5, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn readout_rejects_bad_matrices() {
        assert!(ReadoutMatrix::new(vec![[[0.9, 0.2], [0.0, 1.0]]]).is_err());
        assert!(ReadoutMatrix::new(vec![[[1.1, -0.1], [0.0, 1.0]]]).is_err());
        assert!(apply_readout_noise(&[1.0, 0.0], &ReadoutMatrix::identity(2)).is_err());
    }

    #[test]
    fn depolarizing_zero_rate_is_bit_identical() {
        let c = Circuit::from_gates(2, [Gate::ry(0, 0.4), Gate::cx(0, 1), Gate::rz(1, 0.3)]).unwrap();
        let init = StateVector::zero(2).unwrap();
        let noisy = apply_depolarizing(&c, &init, &DepolarizingModel::new(0.0, 0.0).unwrap()).unwrap();
        assert_eq!(noisy.probabilities, run_circuit(&c, &init).unwrap().probabilities());
        assert_eq!(noisy.branches.len(), 1);
    }

    #[test]
    fn depolarizing_full_rate_single_qubit_is_uniform() {
        let c = Circuit::from_gates(2, [Gate::X(1)]).unwrap();
        let noisy = apply_depolarizing(
            &c,
            &StateVector::zero(2).unwrap(),
            &DepolarizingModel::new(1.0, 0.0).unwrap(),
        )
        .unwrap();
        // qubit 0 stays |0>, qubit 1 uniform
        let p = noisy.probabilities;
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        assert_eq!(p[2] + p[3], 0.0);
    }

    #[test]
    fn depolarizing_cx_full_rate_randomizes_both_qubits() {
        let c = Circuit::from_gates(2, [Gate::cx(0, 1)]).unwrap();
        let noisy = apply_depolarizing(
            &c,
            &StateVector::zero(2).unwrap(),
            &DepolarizingModel::new(0.0, 1.0).unwrap(),
        )
        .unwrap();
        for p in noisy.probabilities {
            assert!((p - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn depolarizing_matches_closed_form_for_one_gate() {
        // |0> then X with rate r: P(1) = 1 - r/2
        let r = 0.3;
        let c = Circuit::from_gates(1, [Gate::X(0)]).unwrap();
        let noisy = apply_depolarizing(&c, &StateVector::zero(1).unwrap(), &DepolarizingModel::new(r, 0.0).unwrap())
            .unwrap();
        assert!((noisy.probabilities[1] - (1.0 - r / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn depolarizing_preserves_normalization_with_truncation() {
        let gates: Vec<Gate> = (0..12)
            .map(|i| if i % 3 == 0 { Gate::cx(0, 1) } else { Gate::u3(i % 2, 0.3 * i as f64, 0.1, -0.2) })
            .collect();
        let c = Circuit::from_gates(2, gates).unwrap();
        let init = StateVector::normalized(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(0.2, 0.0),
            Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        for order in [0, 1, 2, 3] {
            let m = DepolarizingModel::new(0.05, 0.2).unwrap().with_max_order(order);
            let run = apply_depolarizing(&c, &init, &m).unwrap();
            assert!((run.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(run.probabilities.iter().all(|p| *p >= 0.0));
            let branch_mass: f64 = run.branches.iter().map(|(w, _)| w).sum();
            assert!((branch_mass + run.truncated_mass - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn budget_reference_values() {
        let d = DeviceParams::default();
        let b = error_budget(20, 4, 0, &d);
        assert!((b.systematic() - 5.612).abs() < 1e-9);
        assert!((b.statistics - 3.125).abs() < 1e-12);
        assert!((error_budget(20, 4, 2, &d).total() - 14.0).abs() <= 0.005);
        assert!((error_budget(20, 4, 3, &d).total() - 16.63).abs() <= 0.005);
    }

    #[test]
    fn budget_is_linear() {
        let d = DeviceParams::default();
        let a = error_budget(3, 1, 1, &d);
        let b = error_budget(6, 2, 2, &d);
        assert!((2.0 * a.systematic() - b.systematic()).abs() < 1e-12);
        assert_eq!(error_budget(0, 0, 0, &d).systematic(), 0.0);
        let huge = DeviceParams { shots: u64::MAX, ..d };
        assert!(error_budget(0, 0, 0, &huge).total() < 1e-7);
    }

    #[test]
    fn params_parse() {
        let p = DeviceParams::parse(
            "# device\nsingle_qubit_gate_error = 0.001\ncx_gate_error=0.02\nreadout_error=0.03 # avg\nshots=2048\n",
        )
        .unwrap();
        assert_eq!(p.single_qubit_gate_error, 0.001);
        assert_eq!(p.shots, 2048);
        assert_eq!(DeviceParams::parse(&p.to_text()).unwrap(), p);
        assert_eq!(DeviceParams::parse("").unwrap(), DeviceParams::default());
        assert!(DeviceParams::parse("bogus=1").is_err());
        assert!(DeviceParams::parse("cx_gate_error=2").is_err());
        assert!(DeviceParams::parse("shots=0").is_err());
        assert!(DeviceParams::parse("shots").is_err());
    }
}
