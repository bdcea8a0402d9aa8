use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::ln_gamma;

use super::{ClickStream, PhotonError, Result, NS_PER_S};

pub const MIN_WINDOWS: usize = 50;
const MIN_EXPECTED: f64 = 5.0;

/// Statistics of photon counts in consecutive, non-overlapping windows,
/// pooled over all detectors.
#[derive(Clone, Debug, Serialize)]
pub struct CountingStats {
    pub window: f64,
    pub windows: usize,
    pub mean: f64,
    pub variance: f64,
    pub fano: f64,
    /// Mandel `Q = variance/mean − 1`.
    pub mandel_q: f64,
    /// Delta-method standard error of `Q`; `√(2/windows)` for Poisson counts.
    pub q_std_err: f64,
    pub chi_square: f64,
    pub dof: usize,
    /// Goodness of fit against a Poisson law with the sample mean; `None`
    /// when too few cells survive pooling.
    pub poisson_p_value: Option<f64>,
    /// `histogram[k]` windows held exactly `k` clicks.
    pub histogram: Vec<u64>,
}

pub fn counting_stats(stream: &ClickStream, window: f64) -> Result<CountingStats> {
    let duration = stream.duration_s;
    if !(window > 0.0) || window > duration / MIN_WINDOWS as f64 {
        return Err(PhotonError::WindowTooLarge { window, duration });
    }
    let windows = (duration / window).floor() as usize;
    let window_ns = window * NS_PER_S;
    let mut counts = vec![0u64; windows];
    for e in &stream.events {
        let k = (e.timestamp_ns as f64 / window_ns).floor() as usize;
        if k < windows {
            counts[k] += 1;
        }
    }

    let m = windows as f64;
    let mean = counts.iter().sum::<u64>() as f64 / m;
    let central = |p: i32| counts.iter().map(|&c| (c as f64 - mean).powi(p)).sum::<f64>() / m;
    let (mu2, mu3, mu4) = (central(2), central(3), central(4));
    let variance = mu2 * m / (m - 1.0);
    let fano = variance / mean;
    let q_var = (variance * variance / mean.powi(4)) * (variance / m) + (mu4 - mu2 * mu2) / (mean * mean * m)
        - 2.0 * variance * mu3 / (mean.powi(3) * m);

    let top = counts.iter().copied().max().unwrap_or(0) as usize;
    let mut histogram = vec![0u64; top + 1];
    for &c in &counts {
        histogram[c as usize] += 1;
    }
    let (chi_square, dof) = poisson_chi_square(&histogram, mean, m);
    let poisson_p_value = (dof > 0).then(|| ChiSquared::new(dof as f64).map(|d| d.sf(chi_square)).unwrap_or(f64::NAN));

    Ok(CountingStats {
        window,
        windows,
        mean,
        variance,
        fano,
        mandel_q: fano - 1.0,
        q_std_err: q_var.max(0.0).sqrt(),
        chi_square,
        dof,
        poisson_p_value,
        histogram,
    })
}

fn poisson_pmf(k: usize, mean: f64) -> f64 {
    if mean <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let k = k as f64;
    (k * mean.ln() - mean - ln_gamma(k + 1.0)).exp()
}

/// Cells are merged left to right until each expects at least five windows;
/// the last cell absorbs the upper tail. Degrees of freedom are
/// `cells − 2` for the fitted mean.
fn poisson_chi_square(histogram: &[u64], mean: f64, windows: f64) -> (f64, usize) {
    let top = histogram.len() - 1;
    let mut below: f64 = 0.0;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (k, &h) in histogram.iter().enumerate() {
        let p = if k == top { (1.0 - below).max(0.0) } else { poisson_pmf(k, mean) };
        below += p;
        obs += h as f64;
        exp += windows * p;
        if exp >= MIN_EXPECTED {
            cells.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if exp > 0.0 || obs > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += obs;
                last.1 += exp;
            }
            None => cells.push((obs, exp)),
        }
    }
    let chi = cells.iter().map(|&(o, e)| if e > 0.0 { (o - e).powi(2) / e } else { 0.0 }).sum();
    (chi, cells.len().saturating_sub(2))
}
