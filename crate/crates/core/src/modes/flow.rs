use serde::{Deserialize, Serialize};

use super::OscillatorConfig;
use crate::quantum::linalg::{c, C64};

/// Coherent amplitudes of both modes at a given time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudePair {
    pub mu_a: C64,
    pub mu_b: C64,
    pub time: f64,
}

impl AmplitudePair {
    pub fn new(mu_a: C64, mu_b: C64) -> Self {
        Self { mu_a, mu_b, time: 0.0 }
    }

    /// `|μ_A|² + |μ_B|²`, the mean total excitation number.
    pub fn excitation(&self) -> f64 {
        self.mu_a.norm_sqr() + self.mu_b.norm_sqr()
    }
}

/// Solves the c-number flow
/// `dμ_A/dt = −iω_A μ_A + λ μ_B`, `dμ_B/dt = −iω_B μ_B − λ μ_A`
/// exactly from `initial.time` to `initial.time + t`.
///
/// The generator is `−iK` with `K = [[ω_A, iλ], [−iλ, ω_B]]` Hermitian, so the
/// 2×2 exponential has the closed form
/// `e^{−iσt} (cos Ωt − i sin(Ωt)/Ω (K − σ))`, `σ = (ω_A+ω_B)/2`,
/// `Ω = √(δ² + λ²)`, `δ = (ω_A−ω_B)/2`.
pub fn amplitude_flow(initial: &AmplitudePair, config: &OscillatorConfig, t: f64) -> AmplitudePair {
    let sigma = 0.5 * (config.omega_a + config.omega_b);
    let delta = 0.5 * (config.omega_a - config.omega_b);
    let lambda = config.lambda;
    let big_omega = (delta * delta + lambda * lambda).sqrt();
    let cos = (big_omega * t).cos();
    let sinc = if big_omega == 0.0 {
        t
    } else {
        (big_omega * t).sin() / big_omega
    };
    let minus_i = c(0.0, -1.0);
    // K − σ = [[δ, iλ], [−iλ, −δ]]
    let u00 = c(cos, 0.0) + minus_i * sinc * delta;
    let u11 = c(cos, 0.0) + minus_i * sinc * (-delta);
    let u01 = minus_i * sinc * c(0.0, lambda);
    let u10 = minus_i * sinc * c(0.0, -lambda);
    let global = c(0.0, -sigma * t).exp();
    AmplitudePair {
        mu_a: global * (u00 * initial.mu_a + u01 * initial.mu_b),
        mu_b: global * (u10 * initial.mu_a + u11 * initial.mu_b),
        time: initial.time + t,
    }
}
