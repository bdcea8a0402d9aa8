//! Reproducible command-line experiments.
//!
//! A run reads one TOML scenario file, validates it, dispatches to the core
//! modules and writes numeric artifacts plus a `manifest.json` into a run
//! directory. Artifacts are buffered and only written once the whole
//! scenario has succeeded; a failed run leaves the manifest alone, carrying
//! the failure record.

pub mod config;
mod ingest;
mod report;
mod run;
mod scenarios;

pub use config::{Format, Scenario, ScenarioConfig};
pub use ingest::{ingest, ingest_summary, IngestSummary};
pub use report::{report, Report};
pub use run::{execute, resolve_output_dir, run, Artifact, Execution, Manifest, RunOptions, RunOutcome, OUTPUT_ROOT_ENV};

use std::collections::BTreeSet;
use std::fmt::Display;

use thiserror::Error;

use crate::modes::ModesError;
use crate::photon::PhotonError;
use crate::quantum::QuantumError;
use crate::tomography::TomographyError;

/// Every operation of the four core modules, by name.
pub const CORE_OPERATIONS: [&str; 29] = [
    "coherent_state",
    "annihilation",
    "tensor",
    "partial_trace",
    "schmidt",
    "entropy",
    "fidelity",
    "build_hamiltonian",
    "evolve",
    "amplitude_flow",
    "coherence_defect",
    "biorthogonal_leakage",
    "ein_scan",
    "simulate_clicks",
    "waiting_times",
    "counting_stats",
    "g2",
    "coincidences",
    "fit_decay",
    "scheme_mub",
    "scheme_sic",
    "born_probabilities",
    "simulate_tomography",
    "linear_inversion",
    "mle_reconstruct",
    "concurrence",
    "witness_value",
    "chsh",
    "chsh_optimize",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    /// Malformed config or input file.
    #[error("{0}")]
    Parse(String),
    /// Well-formed input that violates a module precondition.
    #[error("{0}")]
    Validation(String),
    /// A computation that ran but failed (truncation guard, no convergence).
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
    #[error("missing artifact {0}")]
    MissingArtifact(String),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

impl HarnessError {
    pub(crate) fn validation(e: impl Display) -> Self {
        HarnessError::Validation(e.to_string())
    }

    pub(crate) fn io(context: impl Display, e: impl Display) -> Self {
        HarnessError::Io(format!("{context}: {e}"))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Parse(_) => "parse",
            HarnessError::Validation(_) => "validation",
            HarnessError::Numeric(_) => "numeric",
            HarnessError::Io(_) => "io",
            HarnessError::MissingArtifact(_) => "missing_artifact",
        }
    }

    /// Process exit status.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Parse(_) => 2,
            HarnessError::Validation(_) => 3,
            HarnessError::Numeric(_) => 4,
            HarnessError::Io(_) | HarnessError::MissingArtifact(_) => 1,
        }
    }

    /// `error kind=<kind> code=<n> reason="<message>"` on one line.
    pub fn one_line(&self) -> String {
        let reason = self.to_string().replace('\n', " ").replace('"', "'");
        format!("error kind={} code={} reason=\"{}\"", self.kind(), self.exit_code(), reason)
    }
}

impl From<QuantumError> for HarnessError {
    fn from(e: QuantumError) -> Self {
        HarnessError::Validation(e.to_string())
    }
}

impl From<ModesError> for HarnessError {
    fn from(e: ModesError) -> Self {
        match e {
            ModesError::TruncationGuard { .. } => HarnessError::Numeric(e.to_string()),
            other => HarnessError::Validation(other.to_string()),
        }
    }
}

impl From<PhotonError> for HarnessError {
    fn from(e: PhotonError) -> Self {
        match e {
            PhotonError::Format { .. } | PhotonError::NonMonotone { .. } => HarnessError::Parse(e.to_string()),
            other => HarnessError::Validation(other.to_string()),
        }
    }
}

impl From<TomographyError> for HarnessError {
    fn from(e: TomographyError) -> Self {
        match e {
            TomographyError::NotConverged { .. } | TomographyError::Singular(_) => HarnessError::Numeric(e.to_string()),
            TomographyError::BadTable(_) => HarnessError::Parse(e.to_string()),
            other => HarnessError::Validation(other.to_string()),
        }
    }
}

/// Names of the core operations a run invoked.
#[derive(Clone, Debug, Default)]
pub struct OperationLog(BTreeSet<&'static str>);

impl OperationLog {
    pub(crate) fn hit(&mut self, name: &'static str) {
        debug_assert!(CORE_OPERATIONS.contains(&name), "unknown operation {name}");
        self.0.insert(name);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.0.iter().copied().collect()
    }
}
