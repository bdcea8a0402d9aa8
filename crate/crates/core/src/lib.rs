//! Pointer states of exchange-coupled oscillators, photon-counting
//! statistics and two-photon polarization tomography.
//!
//! - [`quantum`]: truncated Fock spaces, partial traces, entropy, fidelity.
//! - [`modes`]: the coupled two-mode Hamiltonian, its propagator and the
//!   entanglement-minimizing state scan.
//! - [`photon`]: simulated click streams, g2, counting statistics, waiting
//!   times and decay-curve fits.
//! - [`tomography`]: measurement schemes, reconstruction, concurrence, CHSH.
//! - [`harness`]: TOML scenarios, run directories and reports behind the
//!   `islands` binary.

// guards like `!(x > 0.0)` are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod harness;
pub mod modes;
pub mod optim;
pub mod photon;
pub mod quantum;
pub mod rng;
pub mod tomography;
