use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::data::cell_probabilities;
use super::{pauli, CellData, MeasurementScheme, Result, TomographyError};
use crate::quantum::linalg::{hermitian_eigenvalues, kron, real, trace, trace_distance, CMatrix};
use crate::quantum::DensityMatrix;

pub const PROBABILITY_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    LinearInversion,
    Mle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TomographyResult {
    pub rho_hat: DensityMatrix,
    pub method: Method,
    pub physical: bool,
    pub min_eigenvalue: f64,
    /// `Σ n_i ln max(p_i, 1e-12)` at the estimate.
    pub log_likelihood: f64,
    pub iterations: usize,
    /// Trace distance of the final step (zero for linear inversion).
    pub residual: f64,
    /// Log-likelihood after each accepted iteration, accumulated from the
    /// per-step gains.
    pub history: Vec<f64>,
}

#[derive(Serialize)]
struct ResultFile {
    method: Method,
    physical: bool,
    min_eigenvalue: f64,
    log_likelihood: f64,
    iterations: usize,
    residual: f64,
    rho: Vec<Vec<[f64; 2]>>,
}

impl TomographyResult {
    /// JSON with `ρ` as row-major `[re, im]` pairs.
    pub fn to_json(&self) -> serde_json::Value {
        let m = self.rho_hat.entries();
        let rho = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
        serde_json::to_value(ResultFile {
            method: self.method,
            physical: self.physical,
            min_eigenvalue: self.min_eigenvalue,
            log_likelihood: self.log_likelihood,
            iterations: self.iterations,
            residual: self.residual,
            rho,
        })
        .expect("result serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self { tolerance: 1e-9, max_iterations: 10_000 }
    }
}

struct Observations {
    scheme: MeasurementScheme,
    design: DMatrix<f64>,
    effects: Vec<CMatrix>,
    weights: Vec<f64>,
    freqs: Vec<f64>,
}

impl Observations {
    fn new(data: &impl CellData) -> Result<Self> {
        let scheme = data.kind().scheme();
        let rows = data.cell_weights();
        if rows.len() != scheme.settings() || rows.iter().any(|r| r.len() != scheme.outcomes_per_setting()) {
            return Err(TomographyError::BadTable("table shape does not match its scheme".into()));
        }
        let mut weights = Vec::with_capacity(scheme.cells());
        let mut freqs = Vec::with_capacity(scheme.cells());
        for row in &rows {
            // exact Born tables may carry rounding-level negatives
            if row.iter().any(|&w| !(w >= -1e-12)) {
                return Err(TomographyError::BadTable("cell weights must be nonnegative".into()));
            }
            let row: Vec<f64> = row.iter().map(|&w| w.max(0.0)).collect();
            let total: f64 = row.iter().sum();
            if !(total > 0.0) {
                return Err(TomographyError::BadTable("every setting needs a positive total".into()));
            }
            weights.extend(&row);
            freqs.extend(row.iter().map(|w| w / total));
        }
        Ok(Self { design: scheme.design_matrix(), effects: scheme.joint_effects(), scheme, weights, freqs })
    }

    fn probabilities(&self, rho: &CMatrix) -> Vec<f64> {
        cell_probabilities(rho, &self.scheme).concat()
    }

    /// `L(next) − L(current)` summed from per-cell ratios, which stays
    /// accurate when the change is far below the rounding level of `L`.
    fn likelihood_gain(&self, current: &[f64], next: &[f64]) -> f64 {
        current
            .iter()
            .zip(next)
            .zip(&self.weights)
            .map(|((&p, &q), &n)| {
                if n > 0.0 {
                    let p = p.max(PROBABILITY_FLOOR);
                    n * ((q.max(PROBABILITY_FLOOR) - p) / p).ln_1p()
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// Newton direction on the traceless Pauli coordinates, as a change of `ρ`.
    /// `None` when the observed-information matrix is singular.
    fn newton_direction(&self, probs: &[f64], paulis: &[CMatrix]) -> Option<CMatrix> {
        let a = &self.design;
        let mut grad = DVector::<f64>::zeros(15);
        let mut info = DMatrix::<f64>::zeros(15, 15);
        for (i, (&p, &n)) in probs.iter().zip(&self.weights).enumerate() {
            if n <= 0.0 {
                continue;
            }
            let p = p.max(PROBABILITY_FLOOR);
            for k in 0..15 {
                grad[k] += n * a[(i, k + 1)] / p;
                for l in 0..15 {
                    info[(k, l)] += n * a[(i, k + 1)] * a[(i, l + 1)] / (p * p);
                }
            }
        }
        let delta = info.cholesky()?.solve(&grad);
        let mut d = CMatrix::zeros(4, 4);
        for k in 0..15 {
            d += &paulis[k + 1] * real(delta[k] / 4.0);
        }
        Some(d)
    }

    fn log_likelihood(&self, rho: &CMatrix) -> f64 {
        self.probabilities(rho)
            .iter()
            .zip(&self.weights)
            .map(|(&p, &n)| if n > 0.0 { n * p.max(PROBABILITY_FLOOR).ln() } else { 0.0 })
            .sum()
    }
}

fn pauli_products() -> Vec<CMatrix> {
    (0..16).map(|k| kron(&pauli(k / 4), &pauli(k % 4))).collect()
}

fn finish(rho: CMatrix, method: Method, obs: &Observations, iterations: usize, residual: f64, history: Vec<f64>) -> Result<TomographyResult> {
    let log_likelihood = obs.log_likelihood(&rho);
    let rho_hat = DensityMatrix::new(rho, vec![2, 2])?;
    Ok(TomographyResult {
        physical: rho_hat.is_physical(),
        min_eigenvalue: rho_hat.min_eigenvalue(),
        rho_hat,
        method,
        log_likelihood,
        iterations,
        residual,
        history,
    })
}

/// Least-squares inversion of the Born map on the 15 traceless Pauli
/// coefficients. Hermitian and unit-trace by construction; may be non-positive.
pub fn linear_inversion(data: &impl CellData) -> Result<TomographyResult> {
    let obs = Observations::new(data)?;
    let a = obs.scheme.design_matrix();
    let rank = nalgebra::SVD::new(a.clone(), false, false).rank(1e-10);
    if rank < 16 {
        return Err(TomographyError::Singular(rank));
    }
    let reduced: DMatrix<f64> = a.columns(1, 15).into_owned();
    let rhs = DVector::from_iterator(a.nrows(), (0..a.nrows()).map(|r| obs.freqs[r] - a[(r, 0)]));
    let coef = reduced
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| TomographyError::BadTable(e.to_string()))?;
    let paulis = pauli_products();
    let mut rho = paulis[0].clone() * real(0.25);
    for k in 1..16 {
        rho += &paulis[k] * real(coef[k - 1] / 4.0);
    }
    let rho = (&rho + rho.adjoint()) * real(0.5);
    finish(rho, Method::LinearInversion, &obs, 0, 0.0, Vec::new())
}

/// Iterative `RρR` maximum likelihood, `ρ ← MρM†/Tr` with
/// `M = I + t(R − I)`. `t = 1` is the plain `RρR` step; `t` shrinks
/// whenever a step would lower the likelihood and grows after accepted
/// steps. Each iteration also tries a damped Newton step on the Pauli
/// coordinates, kept only if it stays positive semidefinite, and takes the
/// larger gain. Accepted steps never decrease the likelihood.
pub fn mle_reconstruct(data: &impl CellData, options: &MleOptions) -> Result<TomographyResult> {
    let obs = Observations::new(data)?;
    let settings = obs.scheme.settings() as f64;
    let identity = CMatrix::identity(4, 4);
    let mut rho = identity.clone() * real(0.25);
    let mut ll = obs.log_likelihood(&rho);
    let mut history = vec![ll];
    let mut residual = f64::INFINITY;
    let mut t = 1.0;
    let paulis = pauli_products();

    let mut probs = obs.probabilities(&rho);
    for iteration in 1..=options.max_iterations {
        let mut r = CMatrix::zeros(4, 4);
        for ((e, &f), &p) in obs.effects.iter().zip(&obs.freqs).zip(&probs) {
            if f > 0.0 {
                r += e * real(f / (settings * p.max(PROBABILITY_FLOOR)));
            }
        }
        let direction = &r - &identity;
        let mut accepted: Option<(CMatrix, Vec<f64>, f64)> = None;
        for _ in 0..60 {
            let m = &identity + &direction * real(t);
            let next = &m * &rho * m.adjoint();
            let next = (&next + next.adjoint()) * real(0.5);
            let next = next.unscale(trace(&next).re);
            let next_probs = obs.probabilities(&next);
            let gain = obs.likelihood_gain(&probs, &next_probs);
            if gain >= 0.0 {
                accepted = Some((next, next_probs, gain));
                break;
            }
            t *= 0.5;
        }
        if let Some(newton) = obs.newton_direction(&probs, &paulis) {
            let mut scale = 1.0;
            for _ in 0..20 {
                let next = &rho + &newton * real(scale);
                if hermitian_eigenvalues(&next).min() >= 0.0 {
                    let next_probs = obs.probabilities(&next);
                    let gain = obs.likelihood_gain(&probs, &next_probs);
                    if gain >= 0.0 {
                        if accepted.as_ref().is_none_or(|a| gain > a.2) {
                            accepted = Some((next, next_probs, gain));
                        }
                        break;
                    }
                }
                scale *= 0.5;
            }
        }
        let Some((next, next_probs, gain)) = accepted else {
            // no ascent direction left within rounding
            return finish(rho, Method::Mle, &obs, iteration, 0.0, history);
        };
        residual = trace_distance(&next, &rho);
        rho = next;
        probs = next_probs;
        ll += gain;
        history.push(ll);
        if residual < options.tolerance {
            return finish(rho, Method::Mle, &obs, iteration, residual, history);
        }
        t = (t * 1.5).min(MAX_STRETCH);
    }
    Err(TomographyError::NotConverged {
        iterations: options.max_iterations,
        residual,
        log_likelihood: ll,
    })
}

const MAX_STRETCH: f64 = 4.0;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tomography::{born_probabilities, scheme_mub, scheme_sic};

    #[test]
    fn maximally_mixed_round_trip() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]);
        for scheme in [scheme_mub(), scheme_sic()] {
            let p = born_probabilities(&rho, &scheme).unwrap();
            let li = linear_inversion(&p).unwrap();
            assert!(trace_distance(li.rho_hat.entries(), rho.entries()) < 1e-12);
            let ml = mle_reconstruct(&p, &MleOptions::default()).unwrap();
            assert!(trace_distance(ml.rho_hat.entries(), rho.entries()) < 1e-9);
        }
    }

    #[test]
    fn rejects_misshapen_tables() {
        let t = crate::tomography::CountTable { kind: super::super::SchemeKind::Sic, shots_per_setting: 1, counts: vec![vec![1; 4]] };
        assert!(linear_inversion(&t).is_err());
    }
}
