//! Dense linear algebra for small bipartite Hilbert spaces.
//!
//! States live in a truncated Fock basis (one or two modes) or on a qubit
//! pair. Subsystem dimensions are carried alongside every vector and matrix
//! so that tensor products and partial traces can check their inputs.

mod density;
pub mod linalg;
mod operator;
mod schmidt;
mod state;

pub use density::{entropy, fidelity, nats_to_bits, partial_trace, DensityMatrix};
pub use linalg::{CMatrix, CVector, C64};
pub use operator::{annihilation, number_operator, Operator};
pub use schmidt::{schmidt, SchmidtDecomposition};
pub use state::{coherent_state, coherent_state_with_tolerance, poisson_tail, PureState};

use thiserror::Error;

/// Default bound on the Fock-space probability mass discarded by truncation.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-8;
/// Most negative eigenvalue still accepted as a physical state.
pub const PHYSICAL_TOLERANCE: f64 = 1e-8;
/// Hermiticity and unit-trace tolerance for density matrices.
pub const DENSITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("cutoff {cutoff} is below the minimum of {minimum}")]
    InvalidCutoff { cutoff: usize, minimum: usize },
    #[error("truncation discards probability {loss:.3e}, above tolerance {tolerance:.1e}")]
    TruncationTail { loss: f64, tolerance: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("expected a bipartite system, found {0} subsystems")]
    NotBipartite(usize),
    #[error("subsystem index {0} out of range")]
    BadSubsystem(usize),
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("trace {0:.12} differs from 1")]
    BadTrace(f64),
    #[error("state is not physical: minimum eigenvalue {0:.3e}")]
    NotPhysical(f64),
    #[error("vector is not normalized (norm² = {0:.12})")]
    NotNormalized(f64),
}

pub type Result<T> = std::result::Result<T, QuantumError>;

/// Kronecker composition of two objects of the same kind.
pub trait Tensor {
    fn tensor(&self, other: &Self) -> Self;
}
