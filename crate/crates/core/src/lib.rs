//! Heralded qudit entanglement by boson subtraction.
//!
//! `d`-level bosons are loaded `d` per spatial mode, one in each internal
//! state, and `(d-1)N` superposed single-boson subtractions are applied so that
//! exactly one boson survives per mode. The subtraction pattern is described by
//! a *sculpting bigraph*: circles are spatial modes, dots are subtraction
//! operators, and edges carry a phase and an internal-state colour.
//!
//! The crate is organised as:
//!
//! - [`fock`]: sparse second-quantised state algebra.
//! - [`sculpt`]: bigraph model, built-in schemes, protocol driver and the
//!   matching-sum oracle.
//! - [`targets`]: reference qudit states, qudit extraction and phase-invariant
//!   comparison.
//! - [`circuit`]: linear-optical gate IR, bigraph compiler and heralded
//!   Fock-space simulator.

pub mod circuit;
pub mod fock;
pub mod sculpt;
pub mod targets;

mod error;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Amplitudes with modulus below this are dropped after every operator application.
pub const PRUNE_TOL: f64 = 1e-12;

/// Default tolerance for state comparisons.
pub const COMPARE_TOL: f64 = 1e-9;
