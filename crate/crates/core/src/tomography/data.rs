use std::collections::BTreeMap;

use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::{MeasurementScheme, Result, SchemeKind, TomographyError};
use crate::quantum::DensityMatrix;
use crate::rng;

/// Per-setting cell weights consumed by the estimators: counts or exact
/// probabilities, indexed `[setting][outcome]` in scheme order.
pub trait CellData {
    fn kind(&self) -> SchemeKind;
    fn cell_weights(&self) -> Vec<Vec<f64>>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityTable {
    pub kind: SchemeKind,
    pub probabilities: Vec<Vec<f64>>,
}

impl CellData for ProbabilityTable {
    fn kind(&self) -> SchemeKind {
        self.kind
    }

    fn cell_weights(&self) -> Vec<Vec<f64>> {
        self.probabilities.clone()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountTable {
    pub kind: SchemeKind,
    pub shots_per_setting: u64,
    pub counts: Vec<Vec<u64>>,
}

impl CellData for CountTable {
    fn kind(&self) -> SchemeKind {
        self.kind
    }

    fn cell_weights(&self) -> Vec<Vec<f64>> {
        self.counts.iter().map(|row| row.iter().map(|&n| n as f64).collect()).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct CountTableFile {
    scheme: SchemeKind,
    shots_per_setting: u64,
    counts: BTreeMap<String, BTreeMap<String, u64>>,
}

impl CountTable {
    pub fn frequencies(&self) -> Vec<Vec<f64>> {
        let n = self.shots_per_setting as f64;
        self.counts.iter().map(|row| row.iter().map(|&c| c as f64 / n).collect()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let scheme = self.kind.scheme();
        if self.counts.len() != scheme.settings()
            || self.counts.iter().any(|r| r.len() != scheme.outcomes_per_setting())
        {
            return Err(TomographyError::BadTable(format!(
                "{} table needs {} settings × {} outcomes",
                self.kind.name(),
                scheme.settings(),
                scheme.outcomes_per_setting()
            )));
        }
        for (s, row) in self.counts.iter().enumerate() {
            let total: u64 = row.iter().sum();
            if total != self.shots_per_setting {
                return Err(TomographyError::BadTable(format!(
                    "setting {} sums to {total}, expected {}",
                    scheme.setting_label(s),
                    self.shots_per_setting
                )));
            }
        }
        Ok(())
    }

    /// JSON keyed by setting and outcome labels.
    pub fn to_json(&self) -> String {
        let scheme = self.kind.scheme();
        let mut counts = BTreeMap::new();
        for (s, row) in self.counts.iter().enumerate() {
            let cells = row
                .iter()
                .enumerate()
                .map(|(o, &n)| (scheme.outcome_label(s, o), n))
                .collect();
            counts.insert(scheme.setting_label(s), cells);
        }
        let file = CountTableFile { scheme: self.kind, shots_per_setting: self.shots_per_setting, counts };
        serde_json::to_string_pretty(&file).expect("count table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CountTableFile =
            serde_json::from_str(text).map_err(|e| TomographyError::BadTable(e.to_string()))?;
        let scheme = file.scheme.scheme();
        let mut counts = Vec::with_capacity(scheme.settings());
        for s in 0..scheme.settings() {
            let label = scheme.setting_label(s);
            let cells = file
                .counts
                .get(&label)
                .ok_or_else(|| TomographyError::BadTable(format!("missing setting {label}")))?;
            if cells.len() != scheme.outcomes_per_setting() {
                return Err(TomographyError::BadTable(format!("setting {label} has {} outcomes", cells.len())));
            }
            let row = (0..scheme.outcomes_per_setting())
                .map(|o| {
                    let out = scheme.outcome_label(s, o);
                    cells
                        .get(&out)
                        .copied()
                        .ok_or_else(|| TomographyError::BadTable(format!("missing outcome {out} in {label}")))
                })
                .collect::<Result<Vec<u64>>>()?;
            counts.push(row);
        }
        if file.counts.len() != scheme.settings() {
            return Err(TomographyError::BadTable("unknown setting labels present".into()));
        }
        let table = CountTable { kind: file.scheme, shots_per_setting: file.shots_per_setting, counts };
        table.validate()?;
        Ok(table)
    }
}

pub(crate) fn require_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(TomographyError::NotTwoQubit(rho.dims().to_vec()));
    }
    Ok(())
}

/// `Tr(ρ E_a⊗E_b)` for every joint cell.
pub fn born_probabilities(rho: &DensityMatrix, scheme: &MeasurementScheme) -> Result<ProbabilityTable> {
    require_two_qubit(rho)?;
    rho.require_physical()?;
    Ok(ProbabilityTable { kind: scheme.kind, probabilities: cell_probabilities(rho.entries(), scheme) })
}

pub(crate) fn cell_probabilities(rho: &crate::quantum::CMatrix, scheme: &MeasurementScheme) -> Vec<Vec<f64>> {
    (0..scheme.settings())
        .map(|s| {
            (0..scheme.outcomes_per_setting())
                .map(|o| {
                    let e = scheme.joint_effect(s, o);
                    let mut acc = 0.0;
                    for i in 0..4 {
                        for j in 0..4 {
                            acc += (rho[(i, j)] * e[(j, i)]).re;
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// White-noise admixture: each setting's distribution becomes
/// `(1 − f)·p + f/K` over its `K` cells.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographyNoise {
    pub white_fraction: f64,
}

impl TomographyNoise {
    pub fn none() -> Self {
        Self { white_fraction: 0.0 }
    }

    /// Fraction of accidental joint detections among all coincidences for a
    /// pair source at `pair_rate` seen by two identical detectors.
    /// Singles are `η·R + dark_rate`, true pairs `η²·R`, accidentals
    /// `singles²·window`.
    pub fn from_detectors(efficiency: f64, dark_rate: f64, window: f64, pair_rate: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&efficiency) || dark_rate < 0.0 || window < 0.0 || pair_rate <= 0.0 {
            return Err(TomographyError::InvalidNoise(format!(
                "need efficiency in [0,1], dark_rate ≥ 0, window ≥ 0, pair_rate > 0; got {efficiency}, {dark_rate}, {window}, {pair_rate}"
            )));
        }
        let singles = efficiency * pair_rate + dark_rate;
        let accidental = singles * singles * window;
        let genuine = efficiency * efficiency * pair_rate;
        let total = accidental + genuine;
        let white_fraction = if total > 0.0 { accidental / total } else { 1.0 };
        Ok(Self { white_fraction })
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.white_fraction) {
            return Err(TomographyError::InvalidNoise(format!(
                "white_fraction {} outside [0, 1]",
                self.white_fraction
            )));
        }
        Ok(())
    }
}

/// Multinomial counts per joint setting, drawn as a chain of conditional
/// binomials from a per-setting random stream.
pub fn simulate_tomography(
    rho: &DensityMatrix,
    scheme: &MeasurementScheme,
    shots_per_setting: u64,
    noise: TomographyNoise,
    seed: u64,
) -> Result<CountTable> {
    if shots_per_setting == 0 {
        return Err(TomographyError::BadTable("shots_per_setting must be at least 1".into()));
    }
    noise.validate()?;
    let probs = born_probabilities(rho, scheme)?;
    let f = noise.white_fraction;
    let counts = probs
        .probabilities
        .iter()
        .enumerate()
        .map(|(s, row)| {
            let k = row.len() as f64;
            let mixed: Vec<f64> = row.iter().map(|&p| (1.0 - f) * p.max(0.0) + f / k).collect();
            let mut rng = rng::stream(seed, s as u64);
            multinomial(&mut rng, shots_per_setting, &mixed)
        })
        .collect();
    Ok(CountTable { kind: scheme.kind, shots_per_setting, counts })
}

fn multinomial(rng: &mut rand_chacha::ChaCha8Rng, n: u64, p: &[f64]) -> Vec<u64> {
    let mut left = n;
    let mut mass: f64 = p.iter().sum();
    let mut out = Vec::with_capacity(p.len());
    for (k, &pk) in p.iter().enumerate() {
        if k + 1 == p.len() {
            out.push(left);
            break;
        }
        let q = if mass > 0.0 { (pk / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = if left == 0 { 0 } else { Binomial::new(left, q).expect("valid binomial").sample(rng) };
        out.push(draw);
        left -= draw;
        mass -= pk;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tomography::{scheme_mub, scheme_sic};

    #[test]
    fn maximally_mixed_is_uniform() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]);
        for (scheme, cell) in [(scheme_mub(), 0.25), (scheme_sic(), 1.0 / 16.0)] {
            let p = born_probabilities(&rho, &scheme).unwrap();
            for row in &p.probabilities {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                for &v in row {
                    assert!((v - cell).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]);
        for scheme in [scheme_mub(), scheme_sic()] {
            let t = simulate_tomography(&rho, &scheme, 500, TomographyNoise::none(), 4).unwrap();
            let back = CountTable::from_json(&t.to_json()).unwrap();
            assert_eq!(back, t);
        }
    }

    #[test]
    fn json_rejects_bad_sums() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]);
        let mut t = simulate_tomography(&rho, &scheme_sic(), 100, TomographyNoise::none(), 4).unwrap();
        t.counts[0][0] += 1;
        assert!(CountTable::from_json(&t.to_json()).is_err());
    }

    #[test]
    fn detector_bridge() {
        let clean = TomographyNoise::from_detectors(1.0, 0.0, 1e-9, 1e4).unwrap();
        assert!((clean.white_fraction - 1e-5 / (1.0 + 1e-5)).abs() < 1e-15);
        let blind = TomographyNoise::from_detectors(0.0, 100.0, 1e-9, 1e4).unwrap();
        assert_eq!(blind.white_fraction, 1.0);
    }

    #[test]
    fn multinomial_closure() {
        let mut rng = rng::stream(1, 0);
        let c = multinomial(&mut rng, 1000, &[0.1, 0.0, 0.6, 0.3]);
        assert_eq!(c.iter().sum::<u64>(), 1000);
        assert_eq!(c[1], 0);
    }
}
