//! Photon click streams and the two-detector estimators used to tell
//! Poissonian, bunched and anti-bunched light apart.
//!
//! Timestamps are integer nanoseconds from the start of the acquisition, the
//! resolution of the text click-file format, so a simulated stream and its
//! file form are identical.

mod clickfile;
mod coincidence;
mod counting;
mod decay;
mod g2;
mod simulate;
mod waiting;

pub use clickfile::{parse_clickstream, write_clickstream};
pub use coincidence::{coincidences, CoincidenceReport};
pub use counting::{counting_stats, CountingStats, MIN_WINDOWS};
pub use decay::{
    fit_decay, synthetic_decay, DecayFit, DecayFitOptions, DecayModel, DecayParams, DecayReport,
    DecayVerdict, Modulation, MIN_POINTS,
};
pub use g2::{g2, Bunching, G2Curve, LagGrid};
pub use simulate::simulate_clicks;
pub use waiting::{ks_two_sample, waiting_times, Histogram, WaitingTimeReport};

use thiserror::Error;

use crate::quantum::DensityMatrix;

pub const NS_PER_S: f64 = 1e9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhotonError {
    #[error("invalid source model: {0}")]
    InvalidSource(String),
    #[error("invalid detector model: {0}")]
    InvalidDetector(String),
    #[error("duration must be positive, got {0}")]
    InvalidDuration(f64),
    #[error("need at least {required} events, found {found}")]
    TooFewEvents { required: usize, found: usize },
    #[error("window {window} s gives fewer than 50 bins over {duration} s")]
    WindowTooLarge { window: f64, duration: f64 },
    #[error("stream needs two detectors, found ids {0:?}")]
    SingleDetector(Vec<u8>),
    #[error("need at least {required} points, found {found}")]
    TooFewPoints { required: usize, found: usize },
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error("line {line}: timestamp {timestamp_ns} ns not after {previous_ns} ns on detector {detector}")]
    NonMonotone {
        line: usize,
        detector: u8,
        timestamp_ns: u64,
        previous_ns: u64,
    },
}

pub type Result<T> = std::result::Result<T, PhotonError>;

#[derive(Clone, Debug, PartialEq)]
pub enum SourceKind {
    /// Poissonian emission.
    Coherent,
    /// Intensity follows a positive process with exponential autocorrelation
    /// `∝ exp(−|τ|/coherence_time)` and exponential marginal, so `g2(0) = 2`.
    Thermal { coherence_time: f64 },
    /// One photon per excitation cycle; each cycle is an exponential pump
    /// wait followed by an exponential decay with mean `emitter_lifetime`.
    SingleEmitter { emitter_lifetime: f64 },
    /// Simultaneous photon pairs, one per arm. The polarization state rides
    /// along for tomography.
    PairSource { pair_state: Box<DensityMatrix> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SourceModel {
    /// Photons (pairs for a pair source) per second.
    pub mean_rate: f64,
    pub kind: SourceKind,
}

impl SourceModel {
    pub fn coherent(mean_rate: f64) -> Self {
        Self { mean_rate, kind: SourceKind::Coherent }
    }

    pub fn thermal(mean_rate: f64, coherence_time: f64) -> Self {
        Self { mean_rate, kind: SourceKind::Thermal { coherence_time } }
    }

    pub fn single_emitter(mean_rate: f64, emitter_lifetime: f64) -> Self {
        Self { mean_rate, kind: SourceKind::SingleEmitter { emitter_lifetime } }
    }

    pub fn pair_source(mean_rate: f64, pair_state: DensityMatrix) -> Self {
        Self { mean_rate, kind: SourceKind::PairSource { pair_state: Box::new(pair_state) } }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            SourceKind::Coherent => "coherent",
            SourceKind::Thermal { .. } => "thermal",
            SourceKind::SingleEmitter { .. } => "single_emitter",
            SourceKind::PairSource { .. } => "pair_source",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_rate > 0.0 && self.mean_rate.is_finite()) {
            return Err(PhotonError::InvalidSource(format!("mean_rate must be positive, got {}", self.mean_rate)));
        }
        match &self.kind {
            SourceKind::Coherent => {}
            SourceKind::Thermal { coherence_time } => {
                if !(*coherence_time > 0.0) {
                    return Err(PhotonError::InvalidSource("coherence_time must be positive".into()));
                }
            }
            SourceKind::SingleEmitter { emitter_lifetime } => {
                if !(*emitter_lifetime > 0.0) || emitter_lifetime * self.mean_rate >= 1.0 {
                    return Err(PhotonError::InvalidSource(format!(
                        "emitter_lifetime must be positive and shorter than the mean cycle 1/mean_rate = {}",
                        1.0 / self.mean_rate
                    )));
                }
            }
            SourceKind::PairSource { pair_state } => {
                if pair_state.dims() != [2, 2] {
                    return Err(PhotonError::InvalidSource("pair_state must be a two-qubit state".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DetectorModel {
    pub efficiency: f64,
    /// Dark counts per second.
    pub dark_rate: f64,
    /// Non-paralyzable dead time in seconds.
    pub dead_time: f64,
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self::ideal()
    }
}

impl DetectorModel {
    pub fn ideal() -> Self {
        Self { efficiency: 1.0, dark_rate: 0.0, dead_time: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(PhotonError::InvalidDetector(format!("efficiency {} outside [0, 1]", self.efficiency)));
        }
        if !(self.dark_rate >= 0.0) || !(self.dead_time >= 0.0) {
            return Err(PhotonError::InvalidDetector("dark_rate and dead_time must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClickEvent {
    pub timestamp_ns: u64,
    pub detector: u8,
}

/// Time-ordered detector events over `[0, duration_s]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClickStream {
    pub events: Vec<ClickEvent>,
    pub duration_s: f64,
    pub seed: Option<u64>,
    pub source: Option<SourceModel>,
    pub detectors: Vec<DetectorModel>,
    /// Optional third click-file column, one entry per event when present.
    pub labels: Option<Vec<Option<String>>>,
}

impl ClickStream {
    pub fn empty(duration_s: f64) -> Self {
        Self {
            events: Vec::new(),
            duration_s,
            seed: None,
            source: None,
            detectors: Vec::new(),
            labels: None,
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn detector_ids(&self) -> Vec<u8> {
        let mut ids: Vec<u8> = self.events.iter().map(|e| e.detector).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn timestamps_ns(&self, detector: u8) -> Vec<u64> {
        self.events
            .iter()
            .filter(|e| e.detector == detector)
            .map(|e| e.timestamp_ns)
            .collect()
    }

    pub fn count(&self, detector: u8) -> usize {
        self.events.iter().filter(|e| e.detector == detector).count()
    }

    /// Merges two single-detector streams, relabelling them as detectors 0 and 1.
    pub fn combine(first: &ClickStream, second: &ClickStream) -> ClickStream {
        let mut events: Vec<ClickEvent> = first
            .events
            .iter()
            .map(|e| ClickEvent { detector: 0, ..*e })
            .chain(second.events.iter().map(|e| ClickEvent { detector: 1, ..*e }))
            .collect();
        events.sort_unstable();
        events.dedup();
        ClickStream {
            events,
            duration_s: first.duration_s.min(second.duration_s),
            ..ClickStream::empty(0.0)
        }
    }

    /// Checks ordering and range invariants.
    pub fn validate(&self) -> Result<()> {
        let limit = (self.duration_s * NS_PER_S).floor() as u64;
        let mut last: std::collections::HashMap<u8, u64> = Default::default();
        for (k, e) in self.events.iter().enumerate() {
            if e.timestamp_ns > limit {
                return Err(PhotonError::Format {
                    line: k + 2,
                    reason: format!("timestamp {} ns beyond duration", e.timestamp_ns),
                });
            }
            if let Some(&prev) = last.get(&e.detector) {
                if e.timestamp_ns <= prev {
                    return Err(PhotonError::NonMonotone {
                        line: k + 2,
                        detector: e.detector,
                        timestamp_ns: e.timestamp_ns,
                        previous_ns: prev,
                    });
                }
            }
            last.insert(e.detector, e.timestamp_ns);
        }
        Ok(())
    }
}
