//! Exact simulation of unambiguous discrimination between two nearly identical
//! qubit states, performed through a weak σx⊗σx coupling to a pointer qubit
//! followed by postselection.
//!
//! Modules, bottom-up:
//!
//! * [`qubit_algebra`]: 2×2 / 4×4 complex matrices, density matrices, Bloch vectors.
//! * [`weak_measurement`]: coupling unitary, exact evolution + postselection,
//!   and the closed-form pointer states and Bloch update coefficients.
//! * [`discrimination`]: IDP limit, protocol success probability, POVM sets.
//! * [`error_analysis`]: first-order pointer states under imperfections,
//!   success-to-error ratios β and their Monte Carlo averages.
//! * [`harness`]: configuration, sweeps, CSV / JSON-lines output and the
//!   self-verification suite behind the `weakdisc` binary.

pub mod discrimination;
pub mod error;
pub mod error_analysis;
pub mod harness;
pub mod qubit_algebra;
pub mod weak_measurement;

pub use error::{Error, Result};
pub use num_complex::Complex64;
