//! Time-resolved digital simulation of pair creation in a sudden de Sitter
//! to radiation transition.
//!
//! The pieces, bottom-up:
//!
//! - [`background`]: scale factor, mode frequency, closed-form Bogoliubov
//!   coefficients and an ODE cross-check.
//! - [`schedule`]: uniform conformal-time grid with midpoint coefficients.
//! - [`subspace`]: exact 4×4 matrix-Trotter evolution on the physical states.
//! - [`encoding`]: Pauli decomposition of the generators on four qubits and
//!   synthesis of the per-step gate block.
//! - [`statevector`]: dense simulator, shot sampling, encoded observables.
//! - [`noise`] and [`mitigation`]: synthetic device noise, readout
//!   mitigation on observed bitstrings, zero-noise extrapolation.

pub mod background;
pub mod circuit;
pub mod encoding;
pub mod error;
pub mod mitigation;
pub mod noise;
mod ode;
pub mod schedule;
pub mod statevector;
pub mod subspace;
pub mod verify;

pub use error::{Error, Result};
