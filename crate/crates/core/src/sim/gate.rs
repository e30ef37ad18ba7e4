//! Native and composite gates, and their 2x2 matrices.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major 2x2 complex matrix.
pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// One gate of a circuit. Angles are in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Id(usize),
    X(usize),
    /// Square root of X.
    SX(usize),
    /// `diag(e^{-i phi/2}, e^{i phi/2})`
    RZ { qubit: usize, phi: f64 },
    U3 {
        qubit: usize,
        theta: f64,
        phi: f64,
        lambda: f64,
    },
    CX { control: usize, target: usize },
}

/// Coarse classification used by gate censuses and the noise model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    Single,
    Cx,
}

impl Gate {
    pub fn u3(qubit: usize, theta: f64, phi: f64, lambda: f64) -> Self {
        Gate::U3 {
            qubit,
            theta,
            phi,
            lambda,
        }
    }

    pub fn rz(qubit: usize, phi: f64) -> Self {
        Gate::RZ { qubit, phi }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Gate::CX { control, target }
    }

    /// `exp(-i theta sigma^x / 2)` as a U3 gate.
    pub fn rx(qubit: usize, theta: f64) -> Self {
        Gate::u3(qubit, theta, -PI / 2.0, PI / 2.0)
    }

    /// `exp(-i theta sigma^y / 2)` as a U3 gate.
    pub fn ry(qubit: usize, theta: f64) -> Self {
        Gate::u3(qubit, theta, 0.0, 0.0)
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::CX { .. } => GateKind::Cx,
            _ => GateKind::Single,
        }
    }

    /// Qubits the gate touches, control first for CX.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Id(q) | Gate::X(q) | Gate::SX(q) => vec![q],
            Gate::RZ { qubit, .. } | Gate::U3 { qubit, .. } => vec![qubit],
            Gate::CX { control, target } => vec![control, target],
        }
    }

    /// The 2x2 unitary of a single-qubit gate, `None` for CX.
    pub fn matrix(&self) -> Option<Mat2> {
        match *self {
            Gate::Id(_) => Some([[ONE, ZERO], [ZERO, ONE]]),
            Gate::X(_) => Some([[ZERO, ONE], [ONE, ZERO]]),
            Gate::SX(_) => Some(sx_matrix()),
            Gate::RZ { phi, .. } => Some(rz_matrix(phi)),
            Gate::U3 {
                theta, phi, lambda, ..
            } => Some(u3_matrix(theta, phi, lambda)),
            Gate::CX { .. } => None,
        }
    }

    /// Checks indices against the register width.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        for q in self.qubits() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
        }
        if let Gate::CX { control, target } = *self {
            if control == target {
                return Err(Error::domain(format!(
                    "cx control and target are both qubit {control}"
                )));
            }
        }
        let finite = match *self {
            Gate::RZ { phi, .. } => phi.is_finite(),
            Gate::U3 {
                theta, phi, lambda, ..
            } => theta.is_finite() && phi.is_finite() && lambda.is_finite(),
            _ => true,
        };
        if !finite {
            return Err(Error::domain("gate angle is not finite"));
        }
        Ok(())
    }
}

/// General single-qubit rotation
/// `[[cos(t/2), -e^{i l} sin(t/2)], [e^{i p} sin(t/2), e^{i(l+p)} cos(t/2)]]`.
pub fn u3_matrix(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), -Complex64::from_polar(s, lambda)],
        [
            Complex64::from_polar(s, phi),
            Complex64::from_polar(c, lambda + phi),
        ],
    ]
}

pub fn rz_matrix(phi: f64) -> Mat2 {
    [
        [Complex64::from_polar(1.0, -phi / 2.0), ZERO],
        [ZERO, Complex64::from_polar(1.0, phi / 2.0)],
    ]
}

pub fn sx_matrix() -> Mat2 {
    let a = Complex64::new(0.5, 0.5);
    let b = Complex64::new(0.5, -0.5);
    [[a, b], [b, a]]
}

/// Native-basis form of U3: `RZ(phi+pi) SX RZ(theta-pi) SX RZ(lambda)` as an
/// operator product, returned in circuit (application) order. Equal to
/// [`u3_matrix`] up to a global phase.
pub fn u3_decompose(qubit: usize, theta: f64, phi: f64, lambda: f64) -> Vec<Gate> {
    vec![
        Gate::rz(qubit, lambda),
        Gate::SX(qubit),
        Gate::rz(qubit, theta - PI),
        Gate::SX(qubit),
        Gate::rz(qubit, phi + PI),
    ]
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_adjoint(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

/// Product of the single-qubit gates in circuit order (first gate rightmost).
pub fn sequence_matrix(gates: &[Gate]) -> Option<Mat2> {
    gates.iter().try_fold([[ONE, ZERO], [ZERO, ONE]], |acc, g| {
        g.matrix().map(|m| mat2_mul(&m, &acc))
    })
}

/// `|tr(a^dagger b)| / 2`; equals 1 iff `a` and `b` agree up to phase.
pub fn phase_invariant_fidelity(a: &Mat2, b: &Mat2) -> f64 {
    let p = mat2_mul(&mat2_adjoint(a), b);
    (p[0][0] + p[1][1]).norm() / 2.0
}
