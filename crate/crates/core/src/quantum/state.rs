use super::linalg::{inner, kron_vec, CVector, C64};
use super::{QuantumError, Result, Tensor, DEFAULT_TAIL_TOLERANCE};
use super::{DensityMatrix, Operator};

/// Pure state over a product of local bases.
///
/// Amplitudes are stored in row-major order over `dims`; for two subsystems
/// index `i * dims[1] + j` is the basis vector `|i⟩ ⊗ |j⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(amplitudes: CVector, dims: Vec<usize>) -> Result<Self> {
        let expected: usize = dims.iter().product();
        if amplitudes.len() != expected || dims.is_empty() {
            return Err(QuantumError::DimensionMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        Ok(Self { amplitudes, dims })
    }

    /// Basis vector `index` of a space with local dimensions `dims`.
    pub fn basis(index: usize, dims: Vec<usize>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if index >= n {
            return Err(QuantumError::DimensionMismatch {
                expected: n,
                found: index + 1,
            });
        }
        let mut amplitudes = CVector::zeros(n);
        amplitudes[index] = C64::new(1.0, 0.0);
        Self::new(amplitudes, dims)
    }

    pub fn fock(n: usize, cutoff: usize) -> Result<Self> {
        Self::basis(n, vec![cutoff])
    }

    /// `|n_a⟩ ⊗ |n_b⟩` in a two-mode truncated space.
    pub fn fock_pair(n_a: usize, n_b: usize, cutoff_a: usize, cutoff_b: usize) -> Result<Self> {
        if n_a >= cutoff_a || n_b >= cutoff_b {
            return Err(QuantumError::DimensionMismatch {
                expected: cutoff_a * cutoff_b,
                found: n_a * cutoff_b + n_b + 1,
            });
        }
        Self::basis(n_a * cutoff_b + n_b, vec![cutoff_a, cutoff_b])
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn normalize(&mut self) {
        let n = self.amplitudes.norm();
        if n > 0.0 {
            self.amplitudes.unscale_mut(n);
        }
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    pub fn inner(&self, other: &PureState) -> Result<C64> {
        self.check_same_dims(other)?;
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        let applied = op.apply(self)?;
        Ok(inner(&self.amplitudes, applied.amplitudes()))
    }

    /// Amplitude matrix `M[i, j] = ⟨i, j|ψ⟩` of a bipartite state.
    pub fn coefficient_matrix(&self) -> Result<super::CMatrix> {
        let (na, nb) = self.bipartite_dims()?;
        Ok(super::CMatrix::from_row_slice(na, nb, self.amplitudes.as_slice()))
    }

    /// Reduced state of one side of a bipartite pure state.
    pub fn reduced(&self, keep: usize) -> Result<DensityMatrix> {
        let m = self.coefficient_matrix()?;
        let norm = self.norm_squared();
        let (entries, dim) = match keep {
            0 => (&m * m.adjoint(), self.dims[0]),
            1 => ((m.adjoint() * &m).transpose(), self.dims[1]),
            k => return Err(QuantumError::BadSubsystem(k)),
        };
        DensityMatrix::new(entries.unscale(norm), vec![dim])
    }

    /// Probability carried by basis states where any mode sits at its top
    /// Fock level.
    pub fn top_level_population(&self) -> f64 {
        let n = self.dim();
        let mut total = 0.0;
        for idx in 0..n {
            let mut rem = idx;
            let mut at_top = false;
            for &d in self.dims.iter().rev() {
                if rem % d == d - 1 {
                    at_top = true;
                }
                rem /= d;
            }
            if at_top {
                total += self.amplitudes[idx].norm_sqr();
            }
        }
        total
    }

    pub(crate) fn bipartite_dims(&self) -> Result<(usize, usize)> {
        match self.dims.as_slice() {
            [a, b] => Ok((*a, *b)),
            d => Err(QuantumError::NotBipartite(d.len())),
        }
    }

    fn check_same_dims(&self, other: &PureState) -> Result<()> {
        if self.dims != other.dims {
            return Err(QuantumError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl Tensor for PureState {
    fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
            dims,
        }
    }
}

/// Poisson probability mass at or above `cutoff` for mean `mean`.
pub fn poisson_tail(mean: f64, cutoff: usize) -> f64 {
    if mean <= 0.0 {
        return if cutoff == 0 { 1.0 } else { 0.0 };
    }
    // log of the first tail term, then walk the recursion term *= mean/(n+1)
    let log_first = -mean + cutoff as f64 * mean.ln() - ln_factorial(cutoff);
    let mut term = log_first.exp();
    let mut total = 0.0;
    let mut n = cutoff;
    loop {
        total += term;
        n += 1;
        term *= mean / n as f64;
        if (n as f64 > mean && term < total * 1e-17) || term == 0.0 || n > cutoff + 100_000 {
            break;
        }
    }
    total.min(1.0)
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Coherent state `|μ⟩` truncated to `cutoff` Fock levels and renormalized.
///
/// Returns the state and the discarded probability mass. Fails when the
/// discarded mass exceeds [`DEFAULT_TAIL_TOLERANCE`].
pub fn coherent_state(mu: C64, cutoff: usize) -> Result<(PureState, f64)> {
    coherent_state_with_tolerance(mu, cutoff, DEFAULT_TAIL_TOLERANCE)
}

pub fn coherent_state_with_tolerance(
    mu: C64,
    cutoff: usize,
    tolerance: f64,
) -> Result<(PureState, f64)> {
    if cutoff < 1 {
        return Err(QuantumError::InvalidCutoff { cutoff, minimum: 1 });
    }
    let mean = mu.norm_sqr();
    let loss = poisson_tail(mean, cutoff);
    if loss > tolerance {
        return Err(QuantumError::TruncationTail { loss, tolerance });
    }
    let mut amps = CVector::zeros(cutoff);
    let mut cn = C64::new((-mean / 2.0).exp(), 0.0);
    amps[0] = cn;
    for n in 1..cutoff {
        cn = cn * mu / (n as f64).sqrt();
        amps[n] = cn;
    }
    let state = PureState::new(amps, vec![cutoff])?.normalized();
    Ok((state, loss))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{annihilation, number_operator};

    #[test]
    fn vacuum_has_no_loss() {
        let (s, loss) = coherent_state(C64::new(0.0, 0.0), 10).unwrap();
        assert_eq!(loss, 0.0);
        assert_eq!(s, PureState::fock(0, 10).unwrap());
    }

    #[test]
    fn coherent_mean_photon_number() {
        let (s, _) = coherent_state(C64::new(1.0, 0.0), 30).unwrap();
        let n = s.expectation(&number_operator(30).unwrap()).unwrap();
        assert!((n.re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn small_cutoff_rejected() {
        // Poisson(4) mass above n = 3 is 1 - e^-4 (1 + 4 + 8 + 32/3) ≈ 0.5665
        match coherent_state(C64::new(2.0, 0.0), 4) {
            Err(QuantumError::TruncationTail { loss, .. }) => {
                let expected = 1.0 - (-4.0f64).exp() * (1.0 + 4.0 + 8.0 + 32.0 / 3.0);
                assert!((loss - expected).abs() < 1e-12);
            }
            other => panic!("expected tail error, got {other:?}"),
        }
    }

    #[test]
    fn coherent_is_eigenstate() {
        let mu = C64::new(0.5, 0.0);
        let (s, _) = coherent_state(mu, 30).unwrap();
        let a = annihilation(30).unwrap();
        let applied = a.apply(&s).unwrap();
        let diff = applied.amplitudes() - s.amplitudes() * mu;
        assert!(diff.norm() < 1e-9);
    }

    #[test]
    fn top_level_population_two_modes() {
        let s = PureState::fock_pair(2, 0, 3, 4).unwrap();
        assert_eq!(s.top_level_population(), 1.0);
        let s = PureState::fock_pair(1, 2, 3, 4).unwrap();
        assert_eq!(s.top_level_population(), 0.0);
    }

    #[test]
    fn tail_matches_direct_sum() {
        let direct: f64 = 1.0
            - (0..10)
                .map(|n| (-2.5f64).exp() * 2.5f64.powi(n) / (1..=n).map(f64::from).product::<f64>())
                .sum::<f64>();
        assert!((poisson_tail(2.5, 10) - direct).abs() < 1e-14);
    }
}
