use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{ClickStream, PhotonError, Result, NS_PER_S};

pub const MIN_EVENTS: usize = 10_000;

/// Lag bins centred on `k·bin_width` for `|k·bin_width| ≤ max_lag`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LagGrid {
    pub max_lag: f64,
    pub bin_width: f64,
}

impl LagGrid {
    pub fn new(max_lag: f64, bin_width: f64) -> Self {
        Self { max_lag, bin_width }
    }

    pub fn half_bins(&self) -> usize {
        (self.max_lag / self.bin_width + 1e-9).floor() as usize
    }

    pub fn lags(&self) -> Vec<f64> {
        let k = self.half_bins() as i64;
        (-k..=k).map(|i| i as f64 * self.bin_width).collect()
    }

    fn validate(&self) -> Result<()> {
        if !(self.bin_width > 0.0 && self.max_lag >= 0.0 && self.bin_width.is_finite()) {
            return Err(PhotonError::InvalidSeries(format!(
                "lag grid needs bin_width > 0 and max_lag ≥ 0, got {} and {}",
                self.bin_width, self.max_lag
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bunching {
    Bunched,
    Poissonian,
    AntiBunched,
}

impl Bunching {
    /// Compares an estimate of g2(0) with 1 at `sigma` standard errors.
    pub fn from_estimate(g: f64, std_err: f64, sigma: f64) -> Self {
        if g - 1.0 > sigma * std_err {
            Bunching::Bunched
        } else if 1.0 - g > sigma * std_err {
            Bunching::AntiBunched
        } else {
            Bunching::Poissonian
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Bunching::Bunched => "bunched",
            Bunching::Poissonian => "Poissonian",
            Bunching::AntiBunched => "anti-bunched",
        }
    }
}

/// Normalized cross-correlation between detectors `detectors[0]` (start)
/// and `detectors[1]` (stop); positive lags mean the second detector fired later.
#[derive(Clone, Debug, Serialize)]
pub struct G2Curve {
    pub lags: Vec<f64>,
    pub g2: Vec<f64>,
    pub std_err: Vec<f64>,
    pub coincidences: Vec<u64>,
    pub bin_width: f64,
    pub detectors: [u8; 2],
    pub rates: [f64; 2],
    pub duration: f64,
}

impl G2Curve {
    pub fn zero_index(&self) -> usize {
        self.lags.len() / 2
    }

    pub fn at_zero(&self) -> (f64, f64) {
        let k = self.zero_index();
        (self.g2[k], self.std_err[k])
    }

    /// Zero-lag verdict: departures from 1 smaller than `sigma` standard
    /// errors count as Poissonian.
    pub fn classify(&self, sigma: f64) -> Bunching {
        let (g, se) = self.at_zero();
        Bunching::from_estimate(g, se, sigma)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("lag_s,g2,std_err,coincidences\n");
        for k in 0..self.lags.len() {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{}",
                self.lags[k], self.g2[k], self.std_err[k], self.coincidences[k]
            );
        }
        out
    }
}

/// Histograms stop-minus-start delays into the grid and divides by the
/// count expected for independent trains, `r₁·r₂·w·(T − |τ|)`. Standard
/// errors treat each bin count as Poisson.
pub fn g2(stream: &ClickStream, grid: &LagGrid) -> Result<G2Curve> {
    grid.validate()?;
    let ids = stream.detector_ids();
    if ids.len() < 2 {
        return Err(PhotonError::SingleDetector(ids));
    }
    if stream.len() < MIN_EVENTS {
        return Err(PhotonError::TooFewEvents { required: MIN_EVENTS, found: stream.len() });
    }
    let start = stream.timestamps_ns(ids[0]);
    let stop = stream.timestamps_ns(ids[1]);
    let half = grid.half_bins();
    let bins = 2 * half + 1;
    let w_ns = grid.bin_width * NS_PER_S;
    let reach = (half as f64 + 0.5) * w_ns;
    let mut counts = vec![0u64; bins];
    let mut lo = 0;
    for &t1 in &start {
        let t1f = t1 as f64;
        while lo < stop.len() && (stop[lo] as f64) < t1f - reach {
            lo += 1;
        }
        for &t2 in &stop[lo..] {
            let dt = t2 as f64 - t1f;
            if dt >= reach {
                break;
            }
            let k = (dt / w_ns + half as f64 + 0.5).floor();
            if k >= 0.0 && (k as usize) < bins {
                counts[k as usize] += 1;
            }
        }
    }

    let duration = stream.duration_s;
    let rates = [start.len() as f64 / duration, stop.len() as f64 / duration];
    let lags = grid.lags();
    let mut g = Vec::with_capacity(bins);
    let mut se = Vec::with_capacity(bins);
    for (k, &lag) in lags.iter().enumerate() {
        let norm = rates[0] * rates[1] * grid.bin_width * (duration - lag.abs()).max(0.0);
        if norm > 0.0 {
            g.push(counts[k] as f64 / norm);
            se.push((counts[k] as f64).max(1.0).sqrt() / norm);
        } else {
            g.push(0.0);
            se.push(f64::INFINITY);
        }
    }
    Ok(G2Curve {
        lags,
        g2: g,
        std_err: se,
        coincidences: counts,
        bin_width: grid.bin_width,
        detectors: [ids[0], ids[1]],
        rates,
        duration,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photon::ClickEvent;

    #[test]
    fn grid_is_symmetric() {
        let lags = LagGrid::new(1e-3, 1e-4).lags();
        assert_eq!(lags.len(), 21);
        for (a, b) in lags.iter().zip(lags.iter().rev()) {
            assert!((a + b).abs() < 1e-18);
        }
        assert_eq!(lags[10], 0.0);
    }

    #[test]
    fn delayed_copy_peaks_at_delay() {
        let mut s = ClickStream::empty(1.0);
        for k in 0..6000u64 {
            let t = k * 150_000 + (k * 7919 % 1000);
            s.events.push(ClickEvent { timestamp_ns: t, detector: 0 });
            s.events.push(ClickEvent { timestamp_ns: t + 2_000, detector: 1 });
        }
        s.events.sort_unstable();
        let c = g2(&s, &LagGrid::new(1e-5, 1e-6)).unwrap();
        let peak = c.coincidences.iter().enumerate().max_by_key(|(_, &n)| n).unwrap().0;
        assert!((c.lags[peak] - 2e-6).abs() < 1e-12);
        assert_eq!(c.coincidences[peak], 6000);
    }

    #[test]
    fn needs_two_detectors() {
        let mut s = ClickStream::empty(1.0);
        s.events = (0..20_000).map(|k| ClickEvent { timestamp_ns: k * 10, detector: 3 }).collect();
        assert!(matches!(g2(&s, &LagGrid::new(1e-6, 1e-7)), Err(PhotonError::SingleDetector(_))));
    }
}
