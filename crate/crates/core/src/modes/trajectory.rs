use serde::Serialize;

use super::propagator::check_guard;
use super::{coherence_defect, OscillatorConfig, Propagator, Result};
use crate::quantum::{entropy, PureState};

/// Sampled evolution of a two-mode state.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    #[serde(skip)]
    pub states: Vec<PureState>,
    pub entropies: Vec<f64>,
    pub coherence_defects: Vec<f64>,
    pub top_level_populations: Vec<f64>,
}

impl Trajectory {
    pub fn max_entropy(&self) -> f64 {
        self.entropies.iter().copied().fold(0.0, f64::max)
    }

    pub fn mean_entropy(&self) -> f64 {
        self.entropies.iter().sum::<f64>() / self.entropies.len().max(1) as f64
    }

    pub fn max_defect(&self) -> f64 {
        self.coherence_defects.iter().copied().fold(0.0, f64::max)
    }

    /// `t,entropy,defect,top_level_population` at 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,entropy,defect,top_level_population\n");
        for k in 0..self.times.len() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                self.times[k], self.entropies[k], self.coherence_defects[k], self.top_level_populations[k]
            ));
        }
        out
    }
}

/// `samples` equally spaced times covering `[0, horizon]` inclusive.
pub fn uniform_times(horizon: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![0.0],
        n => (0..n).map(|k| horizon * k as f64 / (n - 1) as f64).collect(),
    }
}

pub fn simulate_trajectory(
    psi0: &PureState,
    config: &OscillatorConfig,
    times: &[f64],
) -> Result<Trajectory> {
    config.check_dims(psi0.dims())?;
    check_guard(psi0, 0.0)?;
    let propagator = Propagator::new(config)?;
    let states = propagator.evolve_many(psi0, times)?;
    let mut entropies = Vec::with_capacity(times.len());
    let mut coherence_defects = Vec::with_capacity(times.len());
    let mut top_level_populations = Vec::with_capacity(times.len());
    for (state, &t) in states.iter().zip(times) {
        top_level_populations.push(check_guard(state, t)?);
        entropies.push(entropy(&state.reduced(0)?)?);
        coherence_defects.push(coherence_defect(state)?);
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        entropies,
        coherence_defects,
        top_level_populations,
    })
}
