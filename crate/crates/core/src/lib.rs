//! Simulation of spin-s particles on qubit hardware.
//!
//! A spin-s is carried by `2s` qubits whose symmetric (Dicke) subspace
//! reproduces the spin-s Hilbert space. On top of a statevector engine this
//! crate provides the readout protocols for spin means and correlations,
//! the two reference experiments (a spin-1 precessing in a magnetic field
//! and a spin-1 ⊗ spin-1/2 Ising pair), their closed-form curves, a simple
//! noise model with an additive error budget, OpenQASM 2.0 export/import
//! and parameter sweeps rendered to CSV and SVG.
//!
//! Conventions used throughout:
//!
//! - ħ = 1; time only enters through the dimensionless products ωt and Jt.
//! - Qubit 0 is the leftmost ket label and the most significant bit of a
//!   basis index.
//! - `RZ(φ) = diag(e^{-iφ/2}, e^{iφ/2})`.

pub mod error;
pub mod experiments;
pub mod models;
pub mod noise;
pub mod operator;
pub mod protocols;
pub mod qasm;
pub mod sim;
pub mod spin;

pub use error::{Error, Result};
