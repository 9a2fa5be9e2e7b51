//! Numerical toolkit for the coupling regimes of the quantum Rabi model.
//!
//! The crate builds the truncated Rabi Hamiltonian in the qubit-Fock product
//! basis and in its two parity chains, diagonalizes it with self-contained
//! symmetric eigensolvers, and compares the exact results with the
//! Bloch-Siegert (weak coupling) and adiabatic (deep-strong coupling)
//! approximations. On top of that it computes the regime boundaries in the
//! `(g0/omega, mean energy)` plane, static observables of eigenstates and
//! survival-probability dynamics.
//!
//! Units: `hbar = 1`. Public functions that take or return energies use the
//! units of [`ModelParams`]; boundary curves and classification work in
//! ratios (`g0/omega`, `E/omega`). Times passed to [`dynamics`] are `omega * t`.

pub mod dynamics;
pub mod eigensolve;
mod error;
pub mod matrix;
pub mod model;
pub mod observables;
pub mod perturbative;
pub mod regimes;
pub mod special;

pub use error::{Error, Result};
pub use model::{JointState, ModelParams, Parity, Qubit, Truncation};
