//! Decay-curve model comparison by weighted least squares and AIC.
//!
//! Linear coefficients (amplitude, and the cosine/sine pair of a modulation)
//! are projected out exactly; the remaining nonlinear parameters are searched
//! with Nelder–Mead from a grid of starts.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::{PhotonError, Result};
use crate::optim::nelder_mead;
use crate::rng;

pub const MIN_POINTS: usize = 10;
/// A best fit whose envelope falls by less than this fraction over the
/// series is reported as indeterminate.
pub const FLAT_THRESHOLD: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayModel {
    Exponential,
    Hyperbolic,
    ModulatedExponential,
    ModulatedHyperbolic,
}

impl DecayModel {
    pub const ALL: [DecayModel; 4] = [
        DecayModel::Exponential,
        DecayModel::Hyperbolic,
        DecayModel::ModulatedExponential,
        DecayModel::ModulatedHyperbolic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DecayModel::Exponential => "exponential",
            DecayModel::Hyperbolic => "hyperbolic",
            DecayModel::ModulatedExponential => "modulated_exponential",
            DecayModel::ModulatedHyperbolic => "modulated_hyperbolic",
        }
    }

    pub fn is_modulated(&self) -> bool {
        matches!(self, DecayModel::ModulatedExponential | DecayModel::ModulatedHyperbolic)
    }

    fn is_hyperbolic(&self) -> bool {
        matches!(self, DecayModel::Hyperbolic | DecayModel::ModulatedHyperbolic)
    }

    /// Free parameters counted by AIC.
    pub fn parameter_count(&self) -> usize {
        let base = if self.is_hyperbolic() { 3 } else { 2 };
        if self.is_modulated() {
            base + 3
        } else {
            base
        }
    }
}

/// `1 + depth·cos(frequency·t + phase)`, frequency in rad/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Modulation {
    pub depth: f64,
    pub frequency: f64,
    pub phase: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayParams {
    pub amplitude: f64,
    pub tau: f64,
    /// Hyperbolic exponent `p`; absent for exponential decay.
    pub exponent: Option<f64>,
    pub modulation: Option<Modulation>,
}

impl DecayParams {
    pub fn exponential(amplitude: f64, tau: f64) -> Self {
        Self { amplitude, tau, exponent: None, modulation: None }
    }

    pub fn hyperbolic(amplitude: f64, tau: f64, exponent: f64) -> Self {
        Self { amplitude, tau, exponent: Some(exponent), modulation: None }
    }

    pub fn modulated(self, modulation: Modulation) -> Self {
        Self { modulation: Some(modulation), ..self }
    }

    pub fn model(&self) -> DecayModel {
        match (self.exponent.is_some(), self.modulation.is_some()) {
            (false, false) => DecayModel::Exponential,
            (true, false) => DecayModel::Hyperbolic,
            (false, true) => DecayModel::ModulatedExponential,
            (true, true) => DecayModel::ModulatedHyperbolic,
        }
    }

    /// Unit-amplitude, unmodulated shape.
    pub fn envelope(&self, t: f64) -> f64 {
        envelope(self.tau, self.exponent, t)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let m = self
            .modulation
            .map_or(1.0, |m| 1.0 + m.depth * (m.frequency * t + m.phase).cos());
        self.amplitude * self.envelope(t) * m
    }
}

fn envelope(tau: f64, exponent: Option<f64>, t: f64) -> f64 {
    match exponent {
        None => (-t / tau).exp(),
        Some(p) => (1.0 + t / tau).powf(-p),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFitOptions {
    /// Also fit the two modulated models.
    pub modulation: bool,
    pub max_iter: usize,
}

impl Default for DecayFitOptions {
    fn default() -> Self {
        Self { modulation: false, max_iter: 4000 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayFit {
    pub model: DecayModel,
    pub params: Option<DecayParams>,
    /// Weighted residual sum of squares with weights `1/max(counts, 1)`.
    pub wrss: f64,
    pub aic: f64,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub failure: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayVerdict {
    Selected(DecayModel),
    Indeterminate,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub points: usize,
    /// Ascending AIC; failed fits last.
    pub fits: Vec<DecayFit>,
    pub verdict: DecayVerdict,
    /// AIC gap between the best and second-best fit.
    pub delta_aic: Option<f64>,
}

impl DecayReport {
    pub fn best(&self) -> Option<&DecayFit> {
        self.fits.first().filter(|f| f.params.is_some())
    }

    pub fn fit(&self, model: DecayModel) -> Option<&DecayFit> {
        self.fits.iter().find(|f| f.model == model)
    }
}

/// Fits `(t, counts)` with each model and ranks by AIC.
pub fn fit_decay(series: &[(f64, f64)], options: &DecayFitOptions) -> Result<DecayReport> {
    validate(series)?;
    let problem = Problem::new(series);
    let models: Vec<DecayModel> = DecayModel::ALL
        .into_iter()
        .filter(|m| options.modulation || !m.is_modulated())
        .collect();

    let mut fits = Vec::with_capacity(models.len());
    for &model in &models {
        let seed = if model.is_modulated() {
            let base = if model.is_hyperbolic() { DecayModel::Hyperbolic } else { DecayModel::Exponential };
            fits.iter().find(|f: &&DecayFit| f.model == base).and_then(|f| f.params)
        } else {
            None
        };
        fits.push(problem.fit(model, seed, options.max_iter));
    }
    fits.sort_by(|a, b| match (a.params.is_some(), b.params.is_some()) {
        (true, false) => std::cmp::Ordering::Less,
        (false, true) => std::cmp::Ordering::Greater,
        _ => a.aic.total_cmp(&b.aic),
    });

    let delta_aic = match (fits.first(), fits.get(1)) {
        (Some(a), Some(b)) if a.params.is_some() && b.params.is_some() => Some(b.aic - a.aic),
        _ => None,
    };
    let (t0, t1) = (series[0].0, series[series.len() - 1].0);
    let verdict = match fits.first().and_then(|f| f.params.map(|p| (f.model, p))) {
        Some((model, p)) if problem.total > 0.0 && p.envelope(t1) / p.envelope(t0) < 1.0 - FLAT_THRESHOLD => {
            DecayVerdict::Selected(model)
        }
        _ => DecayVerdict::Indeterminate,
    };
    Ok(DecayReport { points: series.len(), fits, verdict, delta_aic })
}

/// Poisson-noised samples of `params` at the given times.
pub fn synthetic_decay(params: &DecayParams, times: &[f64], seed: u64) -> Vec<(f64, f64)> {
    let mut rng = rng::stream(seed, 0);
    times
        .iter()
        .map(|&t| {
            let mean = params.eval(t).max(0.0);
            let n = if mean > 0.0 {
                Poisson::new(mean).expect("positive mean").sample(&mut rng)
            } else {
                0.0
            };
            (t, n)
        })
        .collect()
}

fn validate(series: &[(f64, f64)]) -> Result<()> {
    if series.len() < MIN_POINTS {
        return Err(PhotonError::TooFewPoints { required: MIN_POINTS, found: series.len() });
    }
    for (k, &(t, y)) in series.iter().enumerate() {
        if !t.is_finite() || !y.is_finite() || t < 0.0 || y < 0.0 {
            return Err(PhotonError::InvalidSeries(format!(
                "point {k}: need finite t ≥ 0 and counts ≥ 0, got ({t}, {y})"
            )));
        }
        if k > 0 && t <= series[k - 1].0 {
            return Err(PhotonError::InvalidSeries(format!("point {k}: times must increase")));
        }
    }
    Ok(())
}

struct Problem {
    t: Vec<f64>,
    y: Vec<f64>,
    w: Vec<f64>,
    total: f64,
    span: f64,
    ln_tau: (f64, f64),
    omega: (f64, f64),
}

const LN_P: (f64, f64) = (-3.0, 4.0);

impl Problem {
    fn new(series: &[(f64, f64)]) -> Self {
        let t: Vec<f64> = series.iter().map(|p| p.0).collect();
        let y: Vec<f64> = series.iter().map(|p| p.1).collect();
        let w = y.iter().map(|&v| 1.0 / v.max(1.0)).collect();
        let span = t[t.len() - 1] - t[0];
        let min_step = t.windows(2).map(|p| p[1] - p[0]).fold(f64::INFINITY, f64::min);
        Self {
            total: y.iter().sum(),
            w,
            ln_tau: ((span * 1e-3).ln(), (span * 1e3).ln()),
            omega: (std::f64::consts::PI / span, std::f64::consts::PI / min_step),
            span,
            t,
            y,
        }
    }

    /// Maps an unconstrained search point to `(tau, exponent, frequency)`.
    fn decode(&self, model: DecayModel, x: &[f64]) -> (f64, Option<f64>, Option<f64>) {
        let tau = x[0].clamp(self.ln_tau.0, self.ln_tau.1).exp();
        let mut k = 1;
        let exponent = model.is_hyperbolic().then(|| {
            k += 1;
            x[1].clamp(LN_P.0, LN_P.1).exp()
        });
        let freq = model.is_modulated().then(|| x[k].clamp(self.omega.0, self.omega.1));
        (tau, exponent, freq)
    }

    /// Weighted linear solve for the coefficients given the nonlinear
    /// parameters. Returns the coefficients and the weighted RSS.
    fn project(&self, tau: f64, exponent: Option<f64>, freq: Option<f64>) -> Option<(Vec<f64>, f64)> {
        let n = self.t.len();
        let q = if freq.is_some() { 3 } else { 1 };
        let mut basis = DMatrix::<f64>::zeros(n, q);
        for (i, &t) in self.t.iter().enumerate() {
            let e = envelope(tau, exponent, t);
            basis[(i, 0)] = e;
            if let Some(om) = freq {
                basis[(i, 1)] = e * (om * t).cos();
                basis[(i, 2)] = e * (om * t).sin();
            }
        }
        let mut gram = DMatrix::<f64>::zeros(q, q);
        let mut rhs = DVector::<f64>::zeros(q);
        for i in 0..n {
            for a in 0..q {
                rhs[a] += self.w[i] * basis[(i, a)] * self.y[i];
                for b in 0..q {
                    gram[(a, b)] += self.w[i] * basis[(i, a)] * basis[(i, b)];
                }
            }
        }
        let coef = gram.cholesky()?.solve(&rhs);
        if coef.iter().any(|c| !c.is_finite()) {
            return None;
        }
        let fitted = &basis * &coef;
        let wrss = (0..n).map(|i| self.w[i] * (self.y[i] - fitted[i]).powi(2)).sum();
        Some((coef.iter().copied().collect(), wrss))
    }

    fn objective(&self, model: DecayModel, x: &[f64]) -> f64 {
        let (tau, p, om) = self.decode(model, x);
        self.project(tau, p, om).map_or(f64::INFINITY, |r| r.1)
    }

    fn starts(&self, model: DecayModel, seed: Option<DecayParams>) -> Vec<Vec<f64>> {
        let taus = [0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 100.0].map(|f| (self.span * f).ln());
        let ps = [0.5f64, 1.0, 2.0, 4.0, 8.0].map(f64::ln);
        let envelopes: Vec<Vec<f64>> = match (model.is_hyperbolic(), seed) {
            (false, None) => taus.iter().map(|&a| vec![a]).collect(),
            (true, None) => taus.iter().flat_map(|&a| ps.iter().map(move |&b| vec![a, b])).collect(),
            (false, Some(s)) => vec![vec![s.tau.ln()]],
            (true, Some(s)) => vec![vec![s.tau.ln(), s.exponent.unwrap_or(1.0).ln()]],
        };
        if !model.is_modulated() {
            return envelopes;
        }
        // frequency scan on the seeded envelope, keeping the deepest local minima
        let env = &envelopes[0];
        let dw = 0.25 * std::f64::consts::PI / self.span;
        let count = (((self.omega.1 - self.omega.0) / dw).floor() as usize).min(2000);
        let scan: Vec<(f64, f64)> = (0..=count)
            .map(|k| {
                let om = self.omega.0 + k as f64 * dw;
                let mut x = env.clone();
                x.push(om);
                (om, self.objective(model, &x))
            })
            .collect();
        let mut minima: Vec<(f64, f64)> = (0..scan.len())
            .filter(|&k| {
                (k == 0 || scan[k].1 <= scan[k - 1].1) && (k + 1 == scan.len() || scan[k].1 <= scan[k + 1].1)
            })
            .map(|k| scan[k])
            .collect();
        minima.sort_by(|a, b| a.1.total_cmp(&b.1));
        minima
            .into_iter()
            .take(3)
            .map(|(om, _)| {
                let mut x = env.clone();
                x.push(om);
                x
            })
            .collect()
    }

    fn fit(&self, model: DecayModel, seed: Option<DecayParams>, max_iter: usize) -> DecayFit {
        let failed = |reason: &str| DecayFit {
            model,
            params: None,
            wrss: f64::INFINITY,
            aic: f64::INFINITY,
            residuals: Vec::new(),
            iterations: 0,
            converged: false,
            failure: Some(reason.to_string()),
        };
        if model.is_modulated() && seed.is_none() {
            return failed("no envelope fit to seed the modulation search");
        }
        let mut starts = self.starts(model, seed);
        starts.sort_by(|a, b| self.objective(model, a).total_cmp(&self.objective(model, b)));
        let mut step = vec![0.5];
        if model.is_hyperbolic() {
            step.push(0.3);
        }
        if model.is_modulated() {
            step.push(0.5 * std::f64::consts::PI / self.span);
        }

        let mut best: Option<crate::optim::Minimum> = None;
        let mut iterations = 0;
        for x0 in starts.iter().take(3) {
            let m = nelder_mead(|x| self.objective(model, x), x0, &step, 1e-12, 1e-9, max_iter);
            iterations += m.iterations;
            if best.as_ref().is_none_or(|b| m.value < b.value) {
                best = Some(m);
            }
        }
        let Some(best) = best.filter(|b| b.value.is_finite()) else {
            return failed("no start produced a finite residual");
        };
        let (tau, exponent, freq) = self.decode(model, &best.x);
        let Some((coef, wrss)) = self.project(tau, exponent, freq) else {
            return failed("singular projection at the optimum");
        };
        let modulation = freq.map(|frequency| Modulation {
            depth: coef[1].hypot(coef[2]) / coef[0],
            frequency,
            phase: (-coef[2]).atan2(coef[1]),
        });
        let params = DecayParams { amplitude: coef[0], tau, exponent, modulation };
        let n = self.t.len() as f64;
        let aic = n * (wrss.max(f64::MIN_POSITIVE) / n).ln() + 2.0 * model.parameter_count() as f64;
        let residuals = self.t.iter().zip(&self.y).map(|(&t, &y)| y - params.eval(t)).collect();
        DecayFit {
            model,
            params: Some(params),
            wrss,
            aic,
            residuals,
            iterations,
            converged: best.converged,
            failure: None,
        }
    }
}
