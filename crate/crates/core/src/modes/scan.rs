use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::propagator::check_guard;
use super::{uniform_times, OscillatorConfig, Propagator, Result};
use crate::quantum::linalg::{c, CVector, C64};
use crate::quantum::{coherent_state, entropy, PureState, Tensor};
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Candidate {
    CoherentProduct { mu_a: C64, mu_b: C64 },
    FockPair { n_a: usize, n_b: usize },
    RandomProduct { index: usize },
}

impl Candidate {
    pub fn label(&self) -> String {
        match self {
            Candidate::CoherentProduct { mu_a, mu_b } => format!(
                "coherent({:+.3}{:+.3}i)x({:+.3}{:+.3}i)",
                mu_a.re, mu_a.im, mu_b.re, mu_b.im
            ),
            Candidate::FockPair { n_a, n_b } => format!("fock|{n_a},{n_b}>"),
            Candidate::RandomProduct { index } => format!("random#{index}"),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Candidate::CoherentProduct { .. } => "coherent_product",
            Candidate::FockPair { .. } => "fock_pair",
            Candidate::RandomProduct { .. } => "random_product",
        }
    }
}

/// Which initial product states to compare.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CandidateFamilies {
    /// Single-mode amplitudes; every ordered pair becomes a coherent product.
    pub coherent_amplitudes: Vec<C64>,
    /// Fock pairs `|n, m⟩` with `n + m ≤ fock_max_total`.
    pub fock_max_total: usize,
    /// Locally Haar-random products on the lower half of each cutoff.
    pub random_products: usize,
    pub seed: u64,
}

impl Default for CandidateFamilies {
    fn default() -> Self {
        let mut coherent_amplitudes = vec![c(0.0, 0.0)];
        for r in [0.75, 1.5] {
            coherent_amplitudes.push(c(r, 0.0));
            coherent_amplitudes.push(c(0.0, r));
        }
        Self {
            coherent_amplitudes,
            fock_max_total: 3,
            random_products: 4,
            seed: 0,
        }
    }
}

impl CandidateFamilies {
    pub fn candidates(&self) -> Vec<Candidate> {
        let mut out = Vec::new();
        for &mu_a in &self.coherent_amplitudes {
            for &mu_b in &self.coherent_amplitudes {
                out.push(Candidate::CoherentProduct { mu_a, mu_b });
            }
        }
        for total in 0..=self.fock_max_total {
            for n_a in (0..=total).rev() {
                out.push(Candidate::FockPair { n_a, n_b: total - n_a });
            }
        }
        out.extend((0..self.random_products).map(|index| Candidate::RandomProduct { index }));
        out
    }

    fn prepare(&self, candidate: &Candidate, config: &OscillatorConfig) -> Result<PureState> {
        Ok(match *candidate {
            Candidate::CoherentProduct { mu_a, mu_b } => {
                let (a, _) = coherent_state(mu_a, config.cutoff_a)?;
                let (b, _) = coherent_state(mu_b, config.cutoff_b)?;
                a.tensor(&b)
            }
            Candidate::FockPair { n_a, n_b } => {
                PureState::fock_pair(n_a, n_b, config.cutoff_a, config.cutoff_b)?
            }
            Candidate::RandomProduct { index } => {
                let mut r = rng::stream(self.seed, rng::sub_label(0xE1, index as u64));
                let a = random_local(&mut r, config.cutoff_a)?;
                let b = random_local(&mut r, config.cutoff_b)?;
                a.tensor(&b)
            }
        })
    }
}

fn random_local<R: Rng>(r: &mut R, cutoff: usize) -> Result<PureState> {
    let support = (cutoff / 2).max(1);
    let mut amps = CVector::zeros(cutoff);
    for k in 0..support {
        amps[k] = c(r.sample(StandardNormal), r.sample(StandardNormal));
    }
    Ok(PureState::new(amps, vec![cutoff])?.normalized())
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScanSettings {
    /// Averaging horizon; defaults to one exchange period `2π/λ`.
    pub horizon: Option<f64>,
    pub samples: usize,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            horizon: None,
            samples: 64,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanEntry {
    pub index: usize,
    pub candidate: Candidate,
    pub label: String,
    pub mean_entropy: f64,
    pub max_entropy: f64,
}

/// Candidates sorted by time-averaged reduced entropy, ascending.
#[derive(Clone, Debug, Serialize)]
pub struct EinReport {
    pub horizon: f64,
    pub samples: usize,
    pub entries: Vec<ScanEntry>,
}

impl EinReport {
    fn entropies_of<'a>(&'a self, pred: impl Fn(&Candidate) -> bool + 'a) -> impl Iterator<Item = f64> + 'a {
        self.entries
            .iter()
            .filter(move |e| pred(&e.candidate))
            .map(|e| e.mean_entropy)
    }

    /// Largest mean entropy among coherent products.
    pub fn coherent_ceiling(&self) -> f64 {
        self.entropies_of(|c| matches!(c, Candidate::CoherentProduct { .. }))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest mean entropy among Fock pairs other than the vacuum.
    pub fn excited_fock_floor(&self) -> f64 {
        self.entropies_of(|c| matches!(c, Candidate::FockPair { n_a, n_b } if n_a + n_b >= 1))
            .fold(f64::INFINITY, f64::min)
    }

    /// Every coherent product ranks strictly below every excited Fock pair.
    pub fn coherent_stratum_is_minimal(&self) -> bool {
        self.coherent_ceiling() < self.excited_fock_floor()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,index,family,label,mean_entropy,max_entropy\n");
        for (rank, e) in self.entries.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{:.16e},{:.16e}\n",
                rank,
                e.index,
                e.candidate.family(),
                e.label,
                e.mean_entropy,
                e.max_entropy
            ));
        }
        out
    }
}

/// Ranks candidate initial states by how little they entangle with the other
/// mode over `[0, horizon]`.
pub fn ein_scan(
    config: &OscillatorConfig,
    families: &CandidateFamilies,
    settings: &ScanSettings,
) -> Result<EinReport> {
    config.validate()?;
    let horizon = settings.horizon.unwrap_or_else(|| config.exchange_period());
    let times = uniform_times(horizon, settings.samples);
    let propagator = Propagator::new(config)?;
    let candidates = families.candidates();
    let evaluated: Vec<Result<ScanEntry>> = candidates
        .into_par_iter()
        .enumerate()
        .map(|(index, candidate)| {
            let psi = families.prepare(&candidate, config)?;
            check_guard(&psi, 0.0)?;
            let states = propagator.evolve_many(&psi, &times)?;
            let mut sum = 0.0;
            let mut max: f64 = 0.0;
            for (state, &t) in states.iter().zip(&times) {
                check_guard(state, t)?;
                let s = entropy(&state.reduced(0)?)?;
                sum += s;
                max = max.max(s);
            }
            Ok(ScanEntry {
                index,
                label: candidate.label(),
                candidate,
                mean_entropy: sum / times.len().max(1) as f64,
                max_entropy: max,
            })
        })
        .collect();
    let mut entries = evaluated.into_iter().collect::<Result<Vec<_>>>()?;
    entries.sort_by(|a, b| a.mean_entropy.total_cmp(&b.mean_entropy).then(a.index.cmp(&b.index)));
    Ok(EinReport {
        horizon,
        samples: settings.samples,
        entries,
    })
}
