//! The two reference experiments and their closed-form curves.
//!
//! * A spin-1 (qubits 0, 1) in a magnetic field, `H = ω S·n`. Since
//!   `S = 1/2 (σ_1 + σ_2)`, the propagator is the same single-qubit rotation
//!   about `n` by `ωt` on both qubits.
//! * A spin-1 (qubits 0, 1) coupled to a spin-1/2 (qubit 2) through
//!   `H = J S_1^z σ_2^z = J/2 (σ_0^z σ_2^z + σ_1^z σ_2^z)`, compiled as two
//!   `CX - RZ(Jt) - CX` segments.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sim::{Circuit, Gate, Mat2};
use crate::spin::{SpinRegister, SpinValue};

/// Field direction must be a unit vector to this tolerance.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// Magnetic-field evolution: the product `ωt` and the field direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSpec {
    omega_t: f64,
    direction: [f64; 3],
}

impl FieldSpec {
    pub fn new(omega_t: f64, direction: [f64; 3]) -> Result<Self> {
        if !omega_t.is_finite() || direction.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("field parameters must be finite"));
        }
        let norm = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::domain(format!(
                "field direction must be a unit vector (|n| = {norm})"
            )));
        }
        Ok(Self { omega_t, direction })
    }

    /// Field along +x, the configuration of the reference experiment.
    pub fn along_x(omega_t: f64) -> Result<Self> {
        Self::new(omega_t, [1.0, 0.0, 0.0])
    }

    pub fn omega_t(&self) -> f64 {
        self.omega_t
    }

    pub fn direction(&self) -> [f64; 3] {
        self.direction
    }
}

/// Ising coupling evolution, parameterized by the product `Jt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsingSpec {
    pub jt: f64,
}

impl IsingSpec {
    pub fn new(jt: f64) -> Result<Self> {
        if !jt.is_finite() {
            return Err(Error::domain("Jt must be finite"));
        }
        Ok(Self { jt })
    }
}

/// How the field propagator is turned into gates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FieldMapping {
    /// Closed-form U3 angles, valid for fields in the xy-plane only.
    #[default]
    Perpendicular,
    /// Any direction: the 2x2 exponential converted to U3 angles.
    Exponential,
}

/// Initial state of an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialState {
    /// `|1, 1> = |00>`
    Up,
    /// `|1, 0> = (|01> + |10>)/√2`
    Zero,
    /// `|1, -1> = |11>`
    Down,
    /// Every qubit along +x.
    XPolarized,
}

impl InitialState {
    pub fn name(self) -> &'static str {
        match self {
            InitialState::Up => "m=+1",
            InitialState::Zero => "m=0",
            InitialState::Down => "m=-1",
            InitialState::XPolarized => "x-polarized",
        }
    }
}

impl std::str::FromStr for InitialState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m=+1" | "m=1" | "+1" | "1" | "up" => Ok(InitialState::Up),
            "m=0" | "0" | "zero" => Ok(InitialState::Zero),
            "m=-1" | "-1" | "down" => Ok(InitialState::Down),
            "x-polarized" | "x" | "+x" => Ok(InitialState::XPolarized),
            _ => Err(Error::Config(format!(
                "unknown initial state {s:?} (expected m=+1, m=0, m=-1 or x-polarized)"
            ))),
        }
    }
}

/// Gates taking `|0...0>` to `initial` on `reg`.
pub fn preparation(initial: InitialState, reg: &SpinRegister, n_qubits: usize) -> Result<Circuit> {
    reg.check_fits(n_qubits)?;
    let q: Vec<usize> = reg.qubits().collect();
    let mut c = Circuit::new(n_qubits)?;
    match initial {
        InitialState::Up => {}
        InitialState::Down => {
            for &k in &q {
                c.push(Gate::X(k))?;
            }
        }
        InitialState::Zero => {
            if reg.spin() != SpinValue::ONE {
                return Err(Error::domain("the m=0 preparation is defined for spin-1 only"));
            }
            // (|0>+|1>)|0> -> (|00>+|11>) -> (|01>+|10>)
            c.push(Gate::ry(q[0], FRAC_PI_2))?;
            c.push(Gate::cx(q[0], q[1]))?;
            c.push(Gate::X(q[1]))?;
        }
        InitialState::XPolarized => {
            for &k in &q {
                c.push(Gate::ry(k, FRAC_PI_2))?;
            }
        }
    }
    Ok(c)
}

/// U3 angles `(θ, φ, λ)` of a 2x2 unitary, up to global phase.
fn u3_angles(m: &Mat2) -> (f64, f64, f64) {
    let theta = 2.0 * m[1][0].norm().atan2(m[0][0].norm());
    // when one column entry vanishes its phase is free; anchor on the other
    let a = if m[0][0].norm() > 1e-15 { m[0][0].arg() } else { -m[1][1].arg() };
    let (phi, lambda) = if m[0][0].norm() > 1e-15 && m[1][0].norm() > 1e-15 {
        (m[1][0].arg() - a, (-m[0][1]).arg() - a)
    } else if m[0][0].norm() > 1e-15 {
        (0.0, m[1][1].arg() - a)
    } else {
        (m[1][0].arg(), (-m[0][1]).arg())
    };
    (theta, phi, lambda)
}

/// `cos(ωt/2) I - i sin(ωt/2) σ·n`
fn field_propagator(spec: &FieldSpec) -> Mat2 {
    let (s, c) = (spec.omega_t / 2.0).sin_cos();
    let [nx, ny, nz] = spec.direction;
    [
        [Complex64::new(c, -s * nz), Complex64::new(-s * ny, -s * nx)],
        [Complex64::new(s * ny, -s * nx), Complex64::new(c, s * nz)],
    ]
}

/// One U3 per qubit of `reg` realizing `exp(-i ωt S·n)`.
///
/// With [`FieldMapping::Perpendicular`] the angles are
/// `θ = ωt, φ = atan2(n_y, n_x) - π/2, λ = π/2 - atan2(n_y, n_x)`, and a
/// field with a z-component is rejected.
pub fn magnetic_field_circuit(
    spec: &FieldSpec,
    reg: &SpinRegister,
    n_qubits: usize,
    mapping: FieldMapping,
) -> Result<Circuit> {
    reg.check_fits(n_qubits)?;
    let (theta, phi, lambda) = match mapping {
        FieldMapping::Perpendicular => {
            let [nx, ny, nz] = spec.direction;
            if nz.abs() > UNIT_TOLERANCE {
                return Err(Error::domain(
                    "perpendicular mapping needs n_z = 0; use the exponential mapping",
                ));
            }
            let azimuth = ny.atan2(nx);
            (spec.omega_t, azimuth - FRAC_PI_2, FRAC_PI_2 - azimuth)
        }
        FieldMapping::Exponential => u3_angles(&field_propagator(spec)),
    };
    Circuit::from_gates(n_qubits, reg.qubits().map(|q| Gate::u3(q, theta, phi, lambda)))
}

/// Register layout of the Ising experiment: spin-1 on qubits 0-1, spin-1/2
/// on qubit 2.
pub fn ising_registers() -> (SpinRegister, SpinRegister) {
    (
        SpinRegister::new(SpinValue::ONE, 0),
        SpinRegister::new(SpinValue::HALF, 2),
    )
}

pub const ISING_QUBITS: usize = 3;

/// `exp(-i Jt S_1^z σ_2^z)` as `CX(0,2) RZ_2(Jt) CX(0,2) CX(1,2) RZ_2(Jt) CX(1,2)`.
pub fn ising_evolution(spec: &IsingSpec) -> Result<Circuit> {
    let mut c = Circuit::new(ISING_QUBITS)?;
    for control in [0, 1] {
        // CX·RZ(Jt)·CX = exp(-i Jt/2 σ_c^z σ_2^z)
        c.push(Gate::cx(control, 2))?;
        c.push(Gate::rz(2, spec.jt))?;
        c.push(Gate::cx(control, 2))?;
    }
    Ok(c)
}

/// Full Ising experiment from `|000>`: every qubit rotated to +x, then the
/// coupling.
pub fn ising_circuit(spec: &IsingSpec) -> Result<Circuit> {
    let mut c = Circuit::new(ISING_QUBITS)?;
    for q in 0..ISING_QUBITS {
        c.push(Gate::ry(q, FRAC_PI_2))?;
    }
    c.append(&ising_evolution(spec)?)?;
    Ok(c)
}

/// Full magnetic-field experiment on a 2-qubit spin-1 from `|00>`.
pub fn field_experiment_circuit(initial: InitialState, spec: &FieldSpec) -> Result<Circuit> {
    let reg = SpinRegister::new(SpinValue::ONE, 0);
    let mut c = preparation(initial, &reg, 2)?;
    c.append(&magnetic_field_circuit(spec, &reg, 2, FieldMapping::Perpendicular)?)?;
    Ok(c)
}

fn check_field_initial(initial: InitialState) -> Result<()> {
    if initial == InitialState::XPolarized {
        return Err(Error::domain("closed forms cover the m = +1, 0, -1 initial states"));
    }
    Ok(())
}

/// `(|C_1|^2, |C_0|^2, |C_-1|^2)` for a spin-1 in a field along x.
pub fn analytic_field_probabilities(initial: InitialState, omega_t: f64) -> Result<[f64; 3]> {
    check_field_initial(initial)?;
    let (s, c) = (omega_t / 2.0).sin_cos();
    let half_sin2 = 0.5 * omega_t.sin().powi(2);
    Ok(match initial {
        InitialState::Up => [c.powi(4), half_sin2, s.powi(4)],
        InitialState::Down => [s.powi(4), half_sin2, c.powi(4)],
        _ => [half_sin2, omega_t.cos().powi(2), half_sin2],
    })
}

/// `(<S^x>, <S^y>, <S^z>)` for a spin-1 in a field along x.
pub fn analytic_field_means(initial: InitialState, omega_t: f64) -> Result<[f64; 3]> {
    check_field_initial(initial)?;
    let (s, c) = omega_t.sin_cos();
    Ok(match initial {
        InitialState::Up => [0.0, -s, c],
        InitialState::Down => [0.0, s, -c],
        _ => [0.0, 0.0, 0.0],
    })
}

/// `(|<S_1>|, <S_1^x σ_2^x>) = (|cos Jt|, cos Jt)`.
pub fn analytic_ising(jt: f64) -> (f64, f64) {
    let c = jt.cos();
    (c.abs(), c)
}

/// `(<S_1^x>, <S_1^y>, <S_1^z>) = (cos Jt, 0, 0)`: each spin-1 qubit starts
/// along +x and dephases against the ±1 eigenvalues of `σ_2^z`.
pub fn analytic_ising_means(jt: f64) -> [f64; 3] {
    [jt.cos(), 0.0, 0.0]
}

/// z-basis `|C_m|^2` of the spin-1 in the Ising experiment. The coupling is
/// diagonal, so the binomial split of the initial x-polarized state stays.
pub fn analytic_ising_probabilities(_jt: f64) -> [f64; 3] {
    [0.25, 0.5, 0.25]
}

/// Evenly spaced grid `0, max/(steps-1), ..., max`.
pub fn linspace(max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..steps)
            .map(|i| max * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// The reference grid: `0..=2π` in steps of `π/20` (41 points).
pub fn reference_grid() -> Vec<f64> {
    linspace(2.0 * PI, 41)
}
