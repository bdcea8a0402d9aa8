use std::fs;
use std::path::Path;

use serde::Serialize;

use super::{HarnessError, Result};
use crate::photon::{parse_clickstream, waiting_times, ClickStream};

/// Reads and validates a `clickstream v1` file.
pub fn ingest(path: &Path) -> Result<ClickStream> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path.display(), e))?;
    Ok(parse_clickstream(&text)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetectorSummary {
    pub id: u8,
    pub events: usize,
    pub rate: f64,
    pub first_ns: Option<u64>,
    pub last_ns: Option<u64>,
    /// Present when the detector has enough events for the test.
    pub ks_distance: Option<f64>,
    pub ks_p_value: Option<f64>,
    pub exponential: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IngestSummary {
    pub events: usize,
    pub duration_s: f64,
    pub labelled: bool,
    pub detectors: Vec<DetectorSummary>,
}

pub fn ingest_summary(stream: &ClickStream) -> IngestSummary {
    let detectors = stream
        .detector_ids()
        .into_iter()
        .map(|id| {
            let ts = stream.timestamps_ns(id);
            let ks = waiting_times(stream, id).ok();
            DetectorSummary {
                id,
                events: ts.len(),
                rate: ts.len() as f64 / stream.duration_s,
                first_ns: ts.first().copied(),
                last_ns: ts.last().copied(),
                ks_distance: ks.as_ref().map(|r| r.ks_distance),
                ks_p_value: ks.as_ref().map(|r| r.ks_p_value),
                exponential: ks.as_ref().map(|r| r.exponential),
            }
        })
        .collect();
    IngestSummary {
        events: stream.len(),
        duration_s: stream.duration_s,
        labelled: stream.labels.is_some(),
        detectors,
    }
}

impl IngestSummary {
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![format!(
            "{} events on {} detector(s) over {} s",
            self.events,
            self.detectors.len(),
            self.duration_s
        )];
        for d in &self.detectors {
            let mut line = format!("detector {}: {} events, rate {:.6e} Hz", d.id, d.events, d.rate);
            if let (Some(dist), Some(p), Some(exp)) = (d.ks_distance, d.ks_p_value, d.exponential) {
                let verdict = if exp { "exponential" } else { "not exponential" };
                line.push_str(&format!(", waiting-time KS D = {dist:.4} (p = {p:.3e}, {verdict} at 1%)"));
            }
            out.push(line);
        }
        out
    }
}
