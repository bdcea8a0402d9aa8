use serde::Serialize;

use super::{ClickStream, NS_PER_S};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoincidenceReport {
    pub window: f64,
    /// Pairs with `|t₂ − t₁| ≤ window/2`, true plus accidental.
    pub raw: u64,
    /// `r₁·r₂·window·duration`.
    pub accidental: f64,
    pub corrected: f64,
    /// Poisson standard error of `corrected`.
    pub std_err: f64,
    /// The subtraction went negative and was clipped to zero.
    pub floored: bool,
    /// The accidental baseline is at least half of the raw count.
    pub accidental_dominated: bool,
}

/// Counts start/stop pairs between the two lowest detector ids. Streams
/// with fewer than two detectors give an all-zero report.
pub fn coincidences(stream: &ClickStream, window: f64) -> CoincidenceReport {
    let ids = stream.detector_ids();
    let (a, b) = match ids.as_slice() {
        [a, b, ..] => (stream.timestamps_ns(*a), stream.timestamps_ns(*b)),
        _ => (Vec::new(), Vec::new()),
    };
    let half = window * NS_PER_S / 2.0;
    let mut raw = 0u64;
    let mut lo = 0;
    for &t1 in &a {
        let t1 = t1 as f64;
        while lo < b.len() && (b[lo] as f64) < t1 - half {
            lo += 1;
        }
        raw += b[lo..].iter().take_while(|&&t2| t2 as f64 <= t1 + half).count() as u64;
    }
    let duration = stream.duration_s;
    let accidental = if duration > 0.0 {
        a.len() as f64 * b.len() as f64 * window / duration
    } else {
        0.0
    };
    let diff = raw as f64 - accidental;
    CoincidenceReport {
        window,
        raw,
        accidental,
        corrected: diff.max(0.0),
        std_err: (raw as f64).max(accidental).sqrt(),
        floored: diff < 0.0,
        accidental_dominated: raw > 0 && accidental >= 0.5 * raw as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photon::ClickEvent;

    #[test]
    fn empty_stream_is_zero() {
        let r = coincidences(&ClickStream::empty(1.0), 1e-9);
        assert_eq!((r.raw, r.accidental, r.corrected), (0, 0.0, 0.0));
        assert!(!r.floored);
    }

    #[test]
    fn window_edges_are_inclusive() {
        let mut s = ClickStream::empty(1.0);
        s.events = vec![
            ClickEvent { timestamp_ns: 100, detector: 0 },
            ClickEvent { timestamp_ns: 110, detector: 1 },
            ClickEvent { timestamp_ns: 500, detector: 0 },
            ClickEvent { timestamp_ns: 511, detector: 1 },
        ];
        let r = coincidences(&s, 20e-9);
        assert_eq!(r.raw, 1);
    }
}
