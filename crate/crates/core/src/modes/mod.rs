//! Two exchange-coupled bosonic modes.
//!
//! `H = ω_A a†a + ω_B b†b + iλ(a†b − a b†)` with ħ = 1. The exchange term
//! conserves the total quantum number, so the propagator is built sector by
//! sector from exact eigendecompositions.

mod diagnostics;
mod flow;
mod hamiltonian;
mod propagator;
mod scan;
mod trajectory;

pub use diagnostics::{biorthogonal_leakage, coherence_defect, mode_means};
pub use flow::{amplitude_flow, AmplitudePair};
pub use hamiltonian::{build_hamiltonian, total_number, CoupledHamiltonian};
pub use propagator::{evolve, Propagator};
pub use scan::{ein_scan, Candidate, CandidateFamilies, EinReport, ScanEntry, ScanSettings};
pub use trajectory::{simulate_trajectory, uniform_times, Trajectory};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quantum::QuantumError;

/// Largest population tolerated on the top Fock level of either mode.
pub const TRUNCATION_GUARD: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModesError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error("invalid oscillator config: {0}")]
    InvalidConfig(String),
    #[error("state dimensions {found:?} do not match config cutoffs {expected:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: Vec<usize>,
    },
    #[error("top Fock level population {population:.3e} at t = {time} exceeds {guard:.0e}; raise the cutoff")]
    TruncationGuard {
        time: f64,
        population: f64,
        guard: f64,
    },
    #[error("factor is not normalized (norm² = {0:.12})")]
    NotNormalized(f64),
}

pub type Result<T> = std::result::Result<T, ModesError>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorConfig {
    pub omega_a: f64,
    pub omega_b: f64,
    pub lambda: f64,
    pub cutoff_a: usize,
    pub cutoff_b: usize,
}

impl OscillatorConfig {
    pub fn resonant(omega: f64, lambda: f64, cutoff: usize) -> Self {
        Self {
            omega_a: omega,
            omega_b: omega,
            lambda,
            cutoff_a: cutoff,
            cutoff_b: cutoff,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(ModesError::InvalidConfig(format!(
                "coupling must be finite and nonnegative, got {}",
                self.lambda
            )));
        }
        if !self.omega_a.is_finite() || !self.omega_b.is_finite() {
            return Err(ModesError::InvalidConfig("frequencies must be finite".into()));
        }
        if self.cutoff_a < 2 || self.cutoff_b < 2 {
            return Err(ModesError::InvalidConfig(format!(
                "cutoffs must be at least 2, got ({}, {})",
                self.cutoff_a, self.cutoff_b
            )));
        }
        Ok(())
    }

    pub fn is_resonant(&self) -> bool {
        self.omega_a == self.omega_b
    }

    pub fn dims(&self) -> Vec<usize> {
        vec![self.cutoff_a, self.cutoff_b]
    }

    /// One full exchange period `2π/λ`; infinite when uncoupled.
    pub fn exchange_period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.lambda
    }

    pub(crate) fn check_dims(&self, dims: &[usize]) -> Result<()> {
        if dims != [self.cutoff_a, self.cutoff_b] {
            return Err(ModesError::DimensionMismatch {
                expected: (self.cutoff_a, self.cutoff_b),
                found: dims.to_vec(),
            });
        }
        Ok(())
    }
}
