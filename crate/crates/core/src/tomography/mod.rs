//! Two-qubit polarization tomography: product measurement schemes, Born
//! probabilities, simulated count tables, reconstruction and entanglement
//! measures.

mod data;
mod measures;
mod reconstruct;
mod scheme;

pub use data::{
    born_probabilities, simulate_tomography, CellData, CountTable, ProbabilityTable, TomographyNoise,
};
pub use measures::{
    chsh, chsh_optimize, concurrence, entanglement_report, singlet_witness, witness_value, ChshAngles,
    ChshResult, EntanglementReport,
};
pub use reconstruct::{linear_inversion, mle_reconstruct, Method, MleOptions, TomographyResult, PROBABILITY_FLOOR};
pub use scheme::{pauli, scheme_mub, scheme_sic, sic_bloch_vectors, LocalSetting, MeasurementScheme, SchemeKind};

use thiserror::Error;

use crate::quantum::QuantumError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TomographyError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error("expected a two-qubit state, got subsystem dimensions {0:?}")]
    NotTwoQubit(Vec<usize>),
    #[error("design matrix has rank {0}, need 16")]
    Singular(usize),
    #[error("bad count table: {0}")]
    BadTable(String),
    #[error("invalid noise model: {0}")]
    InvalidNoise(String),
    #[error("witness must be Hermitian")]
    NotHermitianWitness,
    #[error("maximum likelihood did not converge after {iterations} iterations (last step {residual:e}, log-likelihood {log_likelihood})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        log_likelihood: f64,
    },
}

pub type Result<T> = std::result::Result<T, TomographyError>;
