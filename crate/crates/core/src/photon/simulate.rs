use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson, StandardNormal};

use super::{ClickEvent, ClickStream, DetectorModel, PhotonError, Result, SourceKind, SourceModel, NS_PER_S};
use crate::rng;

const SOURCE_STREAM: u64 = 1;
const ROUTING_STREAM: u64 = 2;
const DARK_STREAM: u64 = 16;

/// Generates a reproducible two-detector click stream.
///
/// Single-photon sources are split 50/50 between the detectors; a pair
/// source sends one photon to each. Each detector then thins by its
/// efficiency, adds independent Poisson dark counts and applies its dead
/// time. Two clicks on one detector inside the same nanosecond collapse to
/// one.
pub fn simulate_clicks(
    source: &SourceModel,
    detectors: [DetectorModel; 2],
    duration: f64,
    seed: u64,
) -> Result<ClickStream> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(PhotonError::InvalidDuration(duration));
    }
    source.validate()?;
    for d in &detectors {
        d.validate()?;
    }

    let mut src = rng::stream(seed, SOURCE_STREAM);
    let mut route = rng::stream(seed, ROUTING_STREAM);
    let mut per_detector: [Vec<f64>; 2] = [Vec::new(), Vec::new()];

    match &source.kind {
        SourceKind::PairSource { .. } => {
            for t in poisson_times(&mut src, source.mean_rate, duration) {
                for (d, det) in detectors.iter().enumerate() {
                    if route.random::<f64>() < det.efficiency {
                        per_detector[d].push(t);
                    }
                }
            }
        }
        kind => {
            let emissions = match kind {
                SourceKind::Coherent => poisson_times(&mut src, source.mean_rate, duration),
                SourceKind::Thermal { coherence_time } => {
                    thermal_times(&mut src, source.mean_rate, *coherence_time, duration)
                }
                SourceKind::SingleEmitter { emitter_lifetime } => {
                    emitter_times(&mut src, source.mean_rate, *emitter_lifetime, duration)
                }
                SourceKind::PairSource { .. } => unreachable!(),
            };
            for t in emissions {
                let d = usize::from(route.random::<f64>() >= 0.5);
                if route.random::<f64>() < detectors[d].efficiency {
                    per_detector[d].push(t);
                }
            }
        }
    }

    let mut events = Vec::new();
    for (d, det) in detectors.iter().enumerate() {
        let mut dark = rng::stream(seed, DARK_STREAM + d as u64);
        let mut times = std::mem::take(&mut per_detector[d]);
        if det.dark_rate > 0.0 {
            times.extend(poisson_times(&mut dark, det.dark_rate, duration));
        }
        let ns = to_accepted_ns(times, det.dead_time, duration);
        events.extend(ns.into_iter().map(|t| ClickEvent { timestamp_ns: t, detector: d as u8 }));
    }
    events.sort_unstable();

    Ok(ClickStream {
        events,
        duration_s: duration,
        seed: Some(seed),
        source: Some(source.clone()),
        detectors: detectors.to_vec(),
        labels: None,
    })
}

/// Sorts, quantizes to nanoseconds and applies a non-paralyzable dead time.
fn to_accepted_ns(mut times: Vec<f64>, dead_time: f64, duration: f64) -> Vec<u64> {
    times.sort_by(f64::total_cmp);
    let limit = (duration * NS_PER_S).floor() as u64;
    let dead_ns = (dead_time * NS_PER_S).ceil().max(1.0) as u64;
    let mut out: Vec<u64> = Vec::with_capacity(times.len());
    for t in times {
        let ns = ((t * NS_PER_S).floor() as u64).min(limit);
        match out.last() {
            Some(&last) if ns < last + dead_ns => {}
            _ => out.push(ns),
        }
    }
    out
}

fn poisson_times(rng: &mut ChaCha8Rng, rate: f64, duration: f64) -> Vec<f64> {
    let gap = Exp::new(rate).expect("positive rate");
    let mut out = Vec::with_capacity((rate * duration * 1.1) as usize + 16);
    let mut t = gap.sample(rng);
    while t <= duration {
        out.push(t);
        t += gap.sample(rng);
    }
    out
}

/// Doubly stochastic Poisson emission. The intensity is `|E|²` for a complex
/// Ornstein–Uhlenbeck field with correlation time `2·coherence_time`, held
/// constant over steps of `coherence_time / 20`.
fn thermal_times(rng: &mut ChaCha8Rng, rate: f64, coherence_time: f64, duration: f64) -> Vec<f64> {
    let dt = coherence_time / 20.0;
    let decay = (-dt / (2.0 * coherence_time)).exp();
    let kick = ((1.0 - decay * decay) / 2.0).sqrt();
    let mut re: f64 = rng.sample::<f64, _>(StandardNormal) * 0.5f64.sqrt();
    let mut im: f64 = rng.sample::<f64, _>(StandardNormal) * 0.5f64.sqrt();
    let steps = (duration / dt).ceil() as usize;
    let mut out = Vec::with_capacity((rate * duration * 1.1) as usize + 16);
    for k in 0..steps {
        let start = k as f64 * dt;
        let width = dt.min(duration - start);
        let mean = rate * (re * re + im * im) * width;
        if mean > 0.0 {
            let n = Poisson::new(mean).expect("positive mean").sample(rng) as usize;
            let first = out.len();
            for _ in 0..n {
                out.push(start + width * rng.random::<f64>());
            }
            out[first..].sort_by(f64::total_cmp);
        }
        re = decay * re + kick * rng.sample::<f64, _>(StandardNormal);
        im = decay * im + kick * rng.sample::<f64, _>(StandardNormal);
    }
    out
}

/// Renewal process: pump wait (mean `1/rate − lifetime`) then decay
/// (mean `lifetime`), one photon per cycle.
fn emitter_times(rng: &mut ChaCha8Rng, rate: f64, lifetime: f64, duration: f64) -> Vec<f64> {
    let pump = Exp::new(1.0 / (1.0 / rate - lifetime)).expect("validated cycle");
    let decay = Exp::new(1.0 / lifetime).expect("positive lifetime");
    let mut out = Vec::with_capacity((rate * duration * 1.1) as usize + 16);
    let mut t = pump.sample(rng) + decay.sample(rng);
    while t <= duration {
        out.push(t);
        t += pump.sample(rng) + decay.sample(rng);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dead_time_spacing() {
        let ns = to_accepted_ns(vec![0.0, 1e-7, 2.5e-7, 3e-7, 1e-6], 2e-7, 1.0);
        assert_eq!(ns, vec![0, 250, 1000]);
    }

    #[test]
    fn same_nanosecond_collapses() {
        let ns = to_accepted_ns(vec![1e-9, 1.2e-9, 1.9e-9, 2e-9], 0.0, 1.0);
        assert_eq!(ns, vec![1, 2]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let d = [DetectorModel::ideal(); 2];
        assert!(simulate_clicks(&SourceModel::coherent(10.0), d, 0.0, 1).is_err());
        assert!(simulate_clicks(&SourceModel::single_emitter(1e3, 2e-3), d, 1.0, 1).is_err());
        let bad = [DetectorModel { efficiency: 1.5, ..DetectorModel::ideal() }, DetectorModel::ideal()];
        assert!(simulate_clicks(&SourceModel::coherent(10.0), bad, 1.0, 1).is_err());
    }
}
