//! Scenario configuration files.
//!
//! One TOML file describes one scenario:
//!
//! ```toml
//! scenario = "g2"          # evolve | ein_scan | clicks | g2 | counting | decay_fit
//!                          # tomo_sim | tomo_fit | bell | full_pipeline
//! seed = 42                # required when the scenario draws random numbers
//! output_dir = "runs/g2"   # optional, relative to the config file
//! formats = ["csv", "json"]
//!
//! [params]
//! # scenario-specific block
//! ```
//!
//! Times are in seconds and rates in hertz for photon scenarios. Oscillator
//! frequencies and the coupling share one arbitrary unit, with times in its
//! inverse. Complex amplitudes are `[re, im]` pairs.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{HarnessError, Result};
use crate::modes::OscillatorConfig;
use crate::photon::{DetectorModel, LagGrid, SourceModel};
use crate::quantum::linalg::{kron_vec, CMatrix, CVector, C64};
use crate::quantum::{DensityMatrix, PureState};
use crate::tomography::{MleOptions, SchemeKind, TomographyNoise};

#[derive(Clone, Debug, Deserialize)]
pub struct ScenarioConfig {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    #[serde(flatten)]
    pub scenario: Scenario,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "scenario", content = "params", rename_all = "snake_case")]
pub enum Scenario {
    Evolve(EvolveParams),
    EinScan(EinScanParams),
    Clicks(ClicksParams),
    G2(G2Params),
    Counting(CountingParams),
    DecayFit(DecayFitParams),
    TomoSim(TomoSimParams),
    TomoFit(TomoFitParams),
    Bell(BellParams),
    FullPipeline(PipelineParams),
}

impl Scenario {
    pub const KINDS: [&'static str; 10] = [
        "evolve",
        "ein_scan",
        "clicks",
        "g2",
        "counting",
        "decay_fit",
        "tomo_sim",
        "tomo_fit",
        "bell",
        "full_pipeline",
    ];

    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::Evolve(_) => "evolve",
            Scenario::EinScan(_) => "ein_scan",
            Scenario::Clicks(_) => "clicks",
            Scenario::G2(_) => "g2",
            Scenario::Counting(_) => "counting",
            Scenario::DecayFit(_) => "decay_fit",
            Scenario::TomoSim(_) => "tomo_sim",
            Scenario::TomoFit(_) => "tomo_fit",
            Scenario::Bell(_) => "bell",
            Scenario::FullPipeline(_) => "full_pipeline",
        }
    }

    /// Whether the scenario as configured draws random numbers.
    pub fn is_stochastic(&self) -> bool {
        match self {
            Scenario::Evolve(_) | Scenario::TomoFit(_) | Scenario::Bell(_) => false,
            Scenario::EinScan(p) => p.random_products > 0,
            Scenario::Clicks(_) | Scenario::TomoSim(_) | Scenario::FullPipeline(_) => true,
            Scenario::G2(p) => p.stream.input.is_none(),
            Scenario::Counting(p) => p.stream.input.is_none(),
            Scenario::DecayFit(p) => p.input.is_none(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeState {
    Coherent { mu_a: C64, mu_b: C64 },
    Fock { n_a: usize, n_b: usize },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveParams {
    pub modes: OscillatorConfig,
    pub initial: ModeState,
    /// Defaults to one exchange period `2π/λ`.
    pub horizon: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    64
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EinScanParams {
    pub modes: OscillatorConfig,
    #[serde(default = "default_amplitudes")]
    pub coherent_amplitudes: Vec<C64>,
    #[serde(default = "default_fock_total")]
    pub fock_max_total: usize,
    #[serde(default)]
    pub random_products: usize,
    pub horizon: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_amplitudes() -> Vec<C64> {
    crate::modes::CandidateFamilies::default().coherent_amplitudes
}

fn default_fock_total() -> usize {
    3
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    Coherent { mean_rate: f64 },
    Thermal { mean_rate: f64, coherence_time: f64 },
    SingleEmitter { mean_rate: f64, emitter_lifetime: f64 },
    PairSource { mean_rate: f64, state: StateSpec },
}

impl SourceSpec {
    pub fn build(&self) -> Result<SourceModel> {
        let model = match self {
            SourceSpec::Coherent { mean_rate } => SourceModel::coherent(*mean_rate),
            SourceSpec::Thermal { mean_rate, coherence_time } => SourceModel::thermal(*mean_rate, *coherence_time),
            SourceSpec::SingleEmitter { mean_rate, emitter_lifetime } => {
                SourceModel::single_emitter(*mean_rate, *emitter_lifetime)
            }
            SourceSpec::PairSource { mean_rate, state } => SourceModel::pair_source(*mean_rate, state.build()?),
        };
        model.validate().map_err(HarnessError::validation)?;
        Ok(model)
    }
}

/// Either a click file to read or a source to simulate.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamSpec {
    pub input: Option<PathBuf>,
    pub source: Option<SourceSpec>,
    /// One model for both detectors, or one per detector.
    pub detectors: Option<Vec<DetectorModel>>,
    pub duration: Option<f64>,
}

impl StreamSpec {
    pub fn detector_pair(&self) -> Result<[DetectorModel; 2]> {
        let pair = match self.detectors.as_deref() {
            None => [DetectorModel::ideal(); 2],
            Some([d]) => [*d; 2],
            Some([a, b]) => [*a, *b],
            Some(other) => {
                return Err(HarnessError::Validation(format!("detectors: give 1 or 2 models, got {}", other.len())))
            }
        };
        for d in &pair {
            d.validate().map_err(HarnessError::validation)?;
        }
        Ok(pair)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.input, &self.source) {
            (Some(_), Some(_)) | (None, None) => {
                Err(HarnessError::Validation("give exactly one of `input` and `source`".into()))
            }
            (Some(_), None) => Ok(()),
            (None, Some(source)) => {
                source.build()?;
                self.detector_pair()?;
                match self.duration {
                    Some(d) if d > 0.0 && d.is_finite() => Ok(()),
                    other => Err(HarnessError::Validation(format!("duration must be positive, got {other:?}"))),
                }
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClicksParams {
    pub source: SourceSpec,
    pub detectors: Option<Vec<DetectorModel>>,
    pub duration: f64,
    /// Coincidence window in seconds.
    pub coincidence_window: Option<f64>,
}

impl ClicksParams {
    pub fn stream_spec(&self) -> StreamSpec {
        StreamSpec {
            input: None,
            source: Some(self.source.clone()),
            detectors: self.detectors.clone(),
            duration: Some(self.duration),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct G2Params {
    #[serde(flatten)]
    pub stream: StreamSpec,
    pub max_lag: f64,
    pub bin_width: f64,
}

impl G2Params {
    pub fn grid(&self) -> LagGrid {
        LagGrid::new(self.max_lag, self.bin_width)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountingParams {
    #[serde(flatten)]
    pub stream: StreamSpec,
    pub window: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticDecay {
    pub amplitude: f64,
    pub tau: f64,
    pub exponent: Option<f64>,
    pub modulation: Option<crate::photon::Modulation>,
    pub t_max: f64,
    pub points: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayFitParams {
    /// CSV with a `t,counts` header.
    pub input: Option<PathBuf>,
    pub synthetic: Option<SyntheticDecay>,
    #[serde(default)]
    pub modulation: bool,
}

/// A two-qubit polarization state.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Singlet,
    /// `w·singlet + (1 − w)·I/4`.
    Werner { w: f64 },
    /// Pure product with Bloch angles in radians.
    Product { theta_a: f64, phi_a: f64, theta_b: f64, phi_b: f64 },
    /// Explicit 4×4 matrix, row-major real and imaginary parts.
    Matrix { re: Vec<Vec<f64>>, im: Vec<Vec<f64>> },
}

impl StateSpec {
    pub fn build(&self) -> Result<DensityMatrix> {
        let s = 0.5f64.sqrt();
        let zero = C64::new(0.0, 0.0);
        let singlet = || {
            let v = CVector::from_vec(vec![zero, C64::new(s, 0.0), C64::new(-s, 0.0), zero]);
            DensityMatrix::from_pure(&PureState::new(v, vec![2, 2]).expect("two-qubit vector"))
        };
        let rho = match self {
            StateSpec::Singlet => singlet(),
            StateSpec::Werner { w } => {
                if !(0.0..=1.0).contains(w) {
                    return Err(HarnessError::Validation(format!("werner weight {w} outside [0, 1]")));
                }
                singlet()
                    .mix(&DensityMatrix::maximally_mixed(vec![2, 2]), *w)
                    .map_err(HarnessError::validation)?
            }
            StateSpec::Product { theta_a, phi_a, theta_b, phi_b } => {
                let q = |th: f64, ph: f64| {
                    CVector::from_vec(vec![C64::new((th / 2.0).cos(), 0.0), C64::from_polar((th / 2.0).sin(), ph)])
                };
                let v = kron_vec(&q(*theta_a, *phi_a), &q(*theta_b, *phi_b));
                DensityMatrix::from_pure(&PureState::new(v, vec![2, 2]).expect("two-qubit vector"))
            }
            StateSpec::Matrix { re, im } => {
                let ok = re.len() == 4 && im.len() == 4 && re.iter().chain(im).all(|r| r.len() == 4);
                if !ok {
                    return Err(HarnessError::Validation("matrix state needs 4×4 `re` and `im`".into()));
                }
                let m = CMatrix::from_fn(4, 4, |i, j| C64::new(re[i][j], im[i][j]));
                DensityMatrix::new(m, vec![2, 2]).map_err(HarnessError::validation)?
            }
        };
        if !rho.is_physical() {
            return Err(HarnessError::Validation(format!(
                "state is not positive semidefinite (min eigenvalue {:e})",
                rho.min_eigenvalue()
            )));
        }
        Ok(rho)
    }
}

/// A white-noise fraction, or detector figures converted to one.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum NoiseSpec {
    White { white_fraction: f64 },
    Detectors { efficiency: f64, dark_rate: f64, window: f64, pair_rate: f64 },
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec::White { white_fraction: 0.0 }
    }
}

impl NoiseSpec {
    pub fn build(&self) -> Result<TomographyNoise> {
        let noise = match *self {
            NoiseSpec::White { white_fraction } => TomographyNoise { white_fraction },
            NoiseSpec::Detectors { efficiency, dark_rate, window, pair_rate } => {
                TomographyNoise::from_detectors(efficiency, dark_rate, window, pair_rate)
                    .map_err(HarnessError::validation)?
            }
        };
        noise.validate().map_err(HarnessError::validation)?;
        Ok(noise)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomoSimParams {
    pub state: StateSpec,
    pub scheme: SchemeKind,
    pub shots_per_setting: u64,
    #[serde(default)]
    pub noise: NoiseSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    LinearInversion,
    Mle,
    #[default]
    Both,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomoFitParams {
    /// Count table JSON.
    pub input: PathBuf,
    #[serde(default)]
    pub method: FitMethod,
    #[serde(default)]
    pub mle: MleOptions,
    /// Reference state for a fidelity figure.
    pub truth: Option<StateSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BellParams {
    pub state: StateSpec,
    /// Analyzer angles `[a, a′, b, b′]` in degrees; canonical angles when absent.
    pub angles_deg: Option<[f64; 4]>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineParams {
    pub state: StateSpec,
    pub scheme: SchemeKind,
    pub shots_per_setting: u64,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub mle: MleOptions,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Parse(e.message().replace('\n', " ")))
    }

    /// Checks every module precondition that can be known before computing.
    pub fn validate(&self) -> Result<()> {
        if self.scenario.is_stochastic() && self.seed.is_none() {
            return Err(HarnessError::Validation(format!("scenario {} needs a seed", self.scenario.kind())));
        }
        if self.formats.is_empty() {
            return Err(HarnessError::Validation("formats must not be empty".into()));
        }
        let modes = |m: &OscillatorConfig| m.validate().map_err(HarnessError::validation);
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(HarnessError::Validation(format!("{name} must be positive, got {v}")))
            }
        };
        match &self.scenario {
            Scenario::Evolve(p) => {
                modes(&p.modes)?;
                if let Some(h) = p.horizon {
                    positive("horizon", h)?;
                }
                if p.samples == 0 {
                    return Err(HarnessError::Validation("samples must be at least 1".into()));
                }
                if let ModeState::Fock { n_a, n_b } = p.initial {
                    if n_a >= p.modes.cutoff_a || n_b >= p.modes.cutoff_b {
                        return Err(HarnessError::Validation("Fock numbers must be below the cutoffs".into()));
                    }
                }
            }
            Scenario::EinScan(p) => {
                modes(&p.modes)?;
                if let Some(h) = p.horizon {
                    positive("horizon", h)?;
                }
            }
            Scenario::Clicks(p) => {
                p.stream_spec().validate()?;
                if let Some(w) = p.coincidence_window {
                    positive("coincidence_window", w)?;
                }
            }
            Scenario::G2(p) => {
                p.stream.validate()?;
                positive("bin_width", p.bin_width)?;
                if !(p.max_lag >= 0.0) {
                    return Err(HarnessError::Validation("max_lag must be nonnegative".into()));
                }
            }
            Scenario::Counting(p) => {
                p.stream.validate()?;
                positive("window", p.window)?;
                if let Some(d) = p.stream.duration {
                    if p.window > d / crate::photon::MIN_WINDOWS as f64 {
                        return Err(HarnessError::Validation(format!(
                            "window {} s gives fewer than 50 bins over {d} s",
                            p.window
                        )));
                    }
                }
            }
            Scenario::DecayFit(p) => match (&p.input, &p.synthetic) {
                (Some(_), None) => {}
                (None, Some(s)) => {
                    positive("tau", s.tau)?;
                    positive("t_max", s.t_max)?;
                    if s.points < crate::photon::MIN_POINTS {
                        return Err(HarnessError::Validation("synthetic series needs at least 10 points".into()));
                    }
                }
                _ => return Err(HarnessError::Validation("give exactly one of `input` and `synthetic`".into())),
            },
            Scenario::TomoSim(p) => {
                p.state.build()?;
                p.noise.build()?;
                if p.shots_per_setting == 0 {
                    return Err(HarnessError::Validation("shots_per_setting must be at least 1".into()));
                }
            }
            Scenario::TomoFit(p) => {
                if let Some(t) = &p.truth {
                    t.build()?;
                }
                positive("mle.tolerance", p.mle.tolerance)?;
            }
            Scenario::Bell(p) => {
                p.state.build()?;
            }
            Scenario::FullPipeline(p) => {
                p.state.build()?;
                p.noise.build()?;
                positive("mle.tolerance", p.mle.tolerance)?;
                if p.shots_per_setting == 0 {
                    return Err(HarnessError::Validation("shots_per_setting must be at least 1".into()));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacent_tagging_picks_the_params_block() {
        let c = ScenarioConfig::parse(
            "scenario = \"g2\"\nseed = 4\n[params]\nsource = { kind = \"thermal\", mean_rate = 1e4, coherence_time = 1e-3 }\n\
             duration = 2.0\nmax_lag = 1e-2\nbin_width = 1e-4\n",
        )
        .unwrap();
        assert_eq!(c.scenario.kind(), "g2");
        assert_eq!(c.formats, vec![Format::Csv, Format::Json]);
        assert!(c.scenario.is_stochastic());
        c.validate().unwrap();
    }

    #[test]
    fn file_inputs_need_no_seed() {
        let c = ScenarioConfig::parse("scenario = \"counting\"\n[params]\ninput = \"x.clicks\"\nwindow = 1e-3\n").unwrap();
        assert!(!c.scenario.is_stochastic());
        c.validate().unwrap();
    }

    #[test]
    fn one_or_two_detector_models() {
        let spec = |d: &str| StreamSpec {
            input: None,
            source: Some(SourceSpec::Coherent { mean_rate: 1.0 }),
            detectors: toml::from_str::<toml::Table>(&format!("d = {d}"))
                .unwrap()
                .get("d")
                .map(|v| v.clone().try_into().unwrap()),
            duration: Some(1.0),
        };
        let one = spec("[{ efficiency = 0.5, dark_rate = 1.0, dead_time = 0.0 }]").detector_pair().unwrap();
        assert_eq!(one[0], one[1]);
        let three = "[{ efficiency = 0.5, dark_rate = 1.0, dead_time = 0.0 }, { efficiency = 0.5, dark_rate = 1.0, dead_time = 0.0 }, { efficiency = 0.5, dark_rate = 1.0, dead_time = 0.0 }]";
        assert!(spec(three).detector_pair().is_err());
    }

    #[test]
    fn state_specs_build_physical_states() {
        for s in [
            StateSpec::Singlet,
            StateSpec::Werner { w: 0.3 },
            StateSpec::Product { theta_a: 1.0, phi_a: 0.2, theta_b: 2.0, phi_b: -1.0 },
        ] {
            let rho = s.build().unwrap();
            assert!(rho.is_physical());
            assert!((rho.entries().trace().re - 1.0).abs() < 1e-12);
        }
        let bad = StateSpec::Matrix { re: vec![vec![1.0, 0.0, 0.0, 0.0]; 4], im: vec![vec![0.0; 4]; 4] };
        assert!(bad.build().is_err());
    }

    #[test]
    fn noise_spec_accepts_both_forms() {
        let w: NoiseSpec = toml::from_str("white_fraction = 0.1").unwrap();
        assert_eq!(w.build().unwrap().white_fraction, 0.1);
        let d: NoiseSpec = toml::from_str("efficiency = 0.8\ndark_rate = 500.0\nwindow = 2e-6\npair_rate = 1e4").unwrap();
        assert!(d.build().unwrap().white_fraction > 0.0);
    }
}
