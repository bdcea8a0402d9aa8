use serde::Serialize;

use super::{ClickStream, PhotonError, Result, NS_PER_S};

pub const MIN_EVENTS: usize = 100;
/// Asymptotic Kolmogorov quantile at the 1% level, `√(ln(2/0.01)/2)`.
const KS_C_99: f64 = 1.627_624_4;

#[derive(Clone, Debug, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub overflow: u64,
}

impl Histogram {
    pub fn uniform(values: &[f64], upper: f64, bins: usize) -> Self {
        let width = upper / bins as f64;
        let edges = (0..=bins).map(|k| k as f64 * width).collect();
        let mut counts = vec![0; bins];
        let mut overflow = 0;
        for &v in values {
            let k = (v / width).floor();
            if k >= 0.0 && (k as usize) < bins {
                counts[k as usize] += 1;
            } else {
                overflow += 1;
            }
        }
        Self { edges, counts, overflow }
    }
}

/// Inter-arrival analysis on one detector against an exponential law.
#[derive(Clone, Debug, Serialize)]
pub struct WaitingTimeReport {
    pub detector: u8,
    pub gaps: usize,
    /// Maximum-likelihood rate, `(n − 1)/Σ gaps`.
    pub rate: f64,
    pub ks_distance: f64,
    pub ks_critical_99: f64,
    pub ks_p_value: f64,
    pub exponential: bool,
    pub histogram: Histogram,
}

pub fn waiting_times(stream: &ClickStream, detector: u8) -> Result<WaitingTimeReport> {
    let ts = stream.timestamps_ns(detector);
    if ts.len() < MIN_EVENTS {
        return Err(PhotonError::TooFewEvents { required: MIN_EVENTS, found: ts.len() });
    }
    let mut gaps: Vec<f64> = ts.windows(2).map(|w| (w[1] - w[0]) as f64 / NS_PER_S).collect();
    let total: f64 = gaps.iter().sum();
    let rate = gaps.len() as f64 / total;
    gaps.sort_by(f64::total_cmp);
    let m = gaps.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &g) in gaps.iter().enumerate() {
        let cdf = 1.0 - (-rate * g).exp();
        d = d.max((i + 1) as f64 / m - cdf).max(cdf - i as f64 / m);
    }
    let ks_critical_99 = KS_C_99 / effective_root(m);
    let histogram = Histogram::uniform(&gaps, 5.0 / rate, 50);
    Ok(WaitingTimeReport {
        detector,
        gaps: gaps.len(),
        rate,
        ks_distance: d,
        ks_critical_99,
        ks_p_value: kolmogorov_sf(effective_root(m) * d),
        exponential: d < ks_critical_99,
        histogram,
    })
}

/// Two-sample Kolmogorov–Smirnov distance and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = (na * nb / (na + nb)).sqrt();
    (d, kolmogorov_sf(effective_root_from(ne) * d))
}

fn effective_root(n: f64) -> f64 {
    effective_root_from(n.sqrt())
}

// Stephens' finite-sample correction
fn effective_root_from(root_n: f64) -> f64 {
    root_n + 0.12 + 0.11 / root_n
}

/// `P(K > x)` for the Kolmogorov distribution.
pub(crate) fn kolmogorov_sf(x: f64) -> f64 {
    if x < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let j = j as f64;
        let term = 2.0 * (-1f64).powi(j as i32 - 1) * (-2.0 * j * j * x * x).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}
