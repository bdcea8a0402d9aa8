use nalgebra::DVector;

use super::{build_hamiltonian, ModesError, OscillatorConfig, Result, TRUNCATION_GUARD};
use crate::quantum::linalg::{c, hermitian_eigen, CMatrix, CVector};
use crate::quantum::{Operator, PureState};

/// One invariant block of a Hermitian operator, diagonalized.
#[derive(Clone, Debug)]
struct Sector {
    indices: Vec<usize>,
    energies: DVector<f64>,
    vectors: CMatrix,
}

/// Exact `exp(-iHt)` from an eigendecomposition of a time-independent `H`.
#[derive(Clone, Debug)]
pub struct Propagator {
    sectors: Vec<Sector>,
    dims: Vec<usize>,
}

impl Propagator {
    /// Diagonalizes the coupled-mode Hamiltonian within each total-number
    /// sector `n_a + n_b = N`.
    pub fn new(config: &OscillatorConfig) -> Result<Self> {
        let h = build_hamiltonian(config)?;
        let nb = config.cutoff_b;
        let max_total = config.cutoff_a + config.cutoff_b - 2;
        let blocks = (0..=max_total)
            .map(|total| {
                (0..config.cutoff_a)
                    .filter(|&na| total >= na && total - na < nb)
                    .map(|na| na * nb + (total - na))
                    .collect()
            })
            .collect();
        Ok(Self::from_blocks(&h.full, blocks))
    }

    /// Diagonalizes an arbitrary Hermitian operator as a single block.
    pub fn dense(hamiltonian: &Operator) -> Self {
        Self::from_blocks(hamiltonian, vec![(0..hamiltonian.dim()).collect()])
    }

    fn from_blocks(hamiltonian: &Operator, blocks: Vec<Vec<usize>>) -> Self {
        let m = hamiltonian.matrix();
        let sectors = blocks
            .into_iter()
            .map(|indices| {
                let k = indices.len();
                let block = CMatrix::from_fn(k, k, |r, s| m[(indices[r], indices[s])]);
                let (energies, vectors) = hermitian_eigen(&block);
                Sector {
                    indices,
                    energies,
                    vectors,
                }
            })
            .collect();
        Self {
            sectors,
            dims: hamiltonian.dims().to_vec(),
        }
    }

    /// Spectrum of the diagonalized operator, unsorted across sectors.
    pub fn energies(&self) -> impl Iterator<Item = f64> + '_ {
        self.sectors.iter().flat_map(|s| s.energies.iter().copied())
    }

    /// `exp(-iHt)|ψ⟩` at each requested time.
    pub fn evolve_many(&self, psi: &PureState, times: &[f64]) -> Result<Vec<PureState>> {
        if psi.dims() != self.dims.as_slice() {
            return Err(ModesError::DimensionMismatch {
                expected: (self.dims[0], self.dims.get(1).copied().unwrap_or(1)),
                found: psi.dims().to_vec(),
            });
        }
        let amps = psi.amplitudes();
        let projected: Vec<CVector> = self
            .sectors
            .iter()
            .map(|s| {
                let local = CVector::from_iterator(s.indices.len(), s.indices.iter().map(|&i| amps[i]));
                s.vectors.adjoint() * local
            })
            .collect();
        times
            .iter()
            .map(|&t| {
                let mut out = CVector::zeros(amps.len());
                for (s, coeffs) in self.sectors.iter().zip(&projected) {
                    let phased = CVector::from_fn(coeffs.len(), |k, _| {
                        coeffs[k] * c(0.0, -s.energies[k] * t).exp()
                    });
                    let local = &s.vectors * phased;
                    for (r, &i) in s.indices.iter().enumerate() {
                        out[i] = local[r];
                    }
                }
                Ok(PureState::new(out, self.dims.clone())?)
            })
            .collect()
    }

    pub fn evolve(&self, psi: &PureState, t: f64) -> Result<PureState> {
        Ok(self.evolve_many(psi, &[t])?.remove(0))
    }
}

/// Evolves `psi` under the coupled-mode Hamiltonian for time `t`, enforcing
/// the truncation guard before and after.
pub fn evolve(psi: &PureState, config: &OscillatorConfig, t: f64) -> Result<PureState> {
    config.check_dims(psi.dims())?;
    check_guard(psi, 0.0)?;
    let out = Propagator::new(config)?.evolve(psi, t)?;
    check_guard(&out, t)?;
    Ok(out)
}

pub(crate) fn check_guard(psi: &PureState, time: f64) -> Result<f64> {
    let population = psi.top_level_population() / psi.norm_squared();
    if population >= TRUNCATION_GUARD {
        return Err(ModesError::TruncationGuard {
            time,
            population,
            guard: TRUNCATION_GUARD,
        });
    }
    Ok(population)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{coherent_state, fidelity, Tensor};
    use crate::quantum::linalg::real;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_time_is_identity() {
        let cfg = OscillatorConfig::resonant(1.0, 0.3, 8);
        let (a, _) = coherent_state(c(0.4, 0.2), 8).unwrap();
        let psi = a.tensor(&PureState::fock(1, 8).unwrap());
        let out = evolve(&psi, &cfg, 0.0).unwrap();
        assert!((out.amplitudes() - psi.amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn single_photon_swaps_at_quarter_period() {
        let omega = 0.8;
        let lambda = 0.25;
        let cfg = OscillatorConfig::resonant(omega, lambda, 4);
        let t = FRAC_PI_2 / lambda;
        let out = evolve(&PureState::fock_pair(1, 0, 4, 4).unwrap(), &cfg, t).unwrap();
        // hand exponentiation of the 2×2 block [[ω, -iλ],[iλ, ω]] (basis |0,1⟩, |1,0⟩):
        // |1,0⟩ → e^{-iωt}(cos λt |1,0⟩ − sin λt |0,1⟩)
        let target = PureState::fock_pair(0, 1, 4, 4).unwrap();
        let f = fidelity(&out.density(), &target.density()).unwrap();
        assert!(f >= 1.0 - 1e-9);
        let amp = out.amplitudes()[1];
        let expected = c(0.0, -omega * t).exp() * real(-1.0);
        assert!((amp - expected).norm() < 1e-10);
    }

    #[test]
    fn sector_and_dense_agree() {
        let cfg = OscillatorConfig { omega_a: 1.1, omega_b: 0.6, lambda: 0.4, cutoff_a: 6, cutoff_b: 5 };
        let h = build_hamiltonian(&cfg).unwrap();
        let (a, _) = coherent_state(c(0.3, -0.2), 6).unwrap();
        let (b, _) = coherent_state(c(-0.1, 0.2), 5).unwrap();
        let psi = a.tensor(&b);
        let s = Propagator::new(&cfg).unwrap().evolve(&psi, 3.7).unwrap();
        let d = Propagator::dense(&h.full).evolve(&psi, 3.7).unwrap();
        assert!((s.amplitudes() - d.amplitudes()).norm() < 1e-10);
    }

    #[test]
    fn guard_trips_on_top_level() {
        let cfg = OscillatorConfig::resonant(1.0, 0.1, 4);
        let psi = PureState::fock_pair(3, 0, 4, 4).unwrap();
        assert!(matches!(evolve(&psi, &cfg, 1.0), Err(ModesError::TruncationGuard { .. })));
    }
}
