use super::linalg::{hermitian_eigenvalues, kron, max_abs, outer, psd_sqrt, trace, CMatrix};
use super::{PureState, QuantumError, Result, Tensor, DENSITY_TOLERANCE, PHYSICAL_TOLERANCE};

/// Hermitian unit-trace matrix with subsystem dimensions.
///
/// Positivity is not enforced at construction: estimators such as linear
/// inversion can produce matrices with negative eigenvalues. The smallest
/// eigenvalue is recorded so callers can check [`DensityMatrix::is_physical`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
    dims: Vec<usize>,
    min_eigenvalue: f64,
    // state vector when built from a pure state
    pure: Option<super::CVector>,
}

impl DensityMatrix {
    pub fn new(entries: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if !entries.is_square() || entries.nrows() != n {
            return Err(QuantumError::DimensionMismatch {
                expected: n,
                found: entries.nrows(),
            });
        }
        let skew = max_abs(&(&entries - entries.adjoint()));
        if skew > DENSITY_TOLERANCE {
            return Err(QuantumError::NotHermitian(skew));
        }
        let tr = trace(&entries);
        if (tr.re - 1.0).abs() > DENSITY_TOLERANCE || tr.im.abs() > DENSITY_TOLERANCE {
            return Err(QuantumError::BadTrace(tr.re));
        }
        let min_eigenvalue = hermitian_eigenvalues(&entries).min();
        Ok(Self {
            entries,
            dims,
            min_eigenvalue,
            pure: None,
        })
    }

    /// `|ψ⟩⟨ψ|` for a state normalized on the fly.
    pub fn from_pure(psi: &PureState) -> Self {
        let v = psi.amplitudes().unscale(psi.norm_squared().sqrt());
        Self {
            entries: outer(&v, &v),
            dims: psi.dims().to_vec(),
            min_eigenvalue: 0.0,
            pure: Some(v),
        }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        Self {
            entries: CMatrix::identity(n, n).unscale(n as f64),
            dims,
            min_eigenvalue: 1.0 / n as f64,
            pure: None,
        }
    }

    /// Convex combination `w·self + (1-w)·other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Result<Self> {
        if self.dims != other.dims {
            return Err(QuantumError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Self::new(
            &self.entries * super::linalg::real(w) + &other.entries * super::linalg::real(1.0 - w),
            self.dims.clone(),
        )
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, unitary: &CMatrix) -> Result<Self> {
        Self::new(unitary * &self.entries * unitary.adjoint(), self.dims.clone())
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn is_physical(&self) -> bool {
        self.min_eigenvalue >= -PHYSICAL_TOLERANCE
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries).iter().copied().collect()
    }

    /// `Tr(ρ O)`.
    pub fn expectation(&self, observable: &CMatrix) -> super::C64 {
        // Tr(AB) = Σ_ij A_ij B_ji without forming the product
        let n = self.dim();
        let mut acc = super::C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.entries[(i, j)] * observable[(j, i)];
            }
        }
        acc
    }

    pub fn purity(&self) -> f64 {
        self.expectation(&self.entries).re
    }

    pub(crate) fn require_physical(&self) -> Result<()> {
        if self.is_physical() {
            Ok(())
        } else {
            Err(QuantumError::NotPhysical(self.min_eigenvalue))
        }
    }
}

impl Tensor for DensityMatrix {
    fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            entries: kron(&self.entries, &other.entries),
            dims,
            min_eigenvalue: if self.min_eigenvalue >= 0.0 && other.min_eigenvalue >= 0.0 {
                self.min_eigenvalue * other.min_eigenvalue
            } else {
                hermitian_eigenvalues(&kron(&self.entries, &other.entries)).min()
            },
            pure: match (&self.pure, &other.pure) {
                (Some(a), Some(b)) => Some(a.kronecker(b)),
                _ => None,
            },
        }
    }
}

/// Reduced state of subsystem `keep` (0 or 1) of a bipartite density matrix.
pub fn partial_trace(rho: &DensityMatrix, keep: usize) -> Result<DensityMatrix> {
    let (na, nb) = match rho.dims() {
        [a, b] => (*a, *b),
        d => return Err(QuantumError::NotBipartite(d.len())),
    };
    let m = rho.entries();
    let reduced = match keep {
        0 => CMatrix::from_fn(na, na, |i, k| (0..nb).map(|j| m[(i * nb + j, k * nb + j)]).sum()),
        1 => CMatrix::from_fn(nb, nb, |j, l| (0..na).map(|i| m[(i * nb + j, i * nb + l)]).sum()),
        k => return Err(QuantumError::BadSubsystem(k)),
    };
    let dim = if keep == 0 { na } else { nb };
    DensityMatrix::new(reduced, vec![dim])
}

/// Von Neumann entropy in nats, `-Σ λ ln λ` with `0 ln 0 = 0`.
pub fn entropy(rho: &DensityMatrix) -> Result<f64> {
    let spectrum = hermitian_eigenvalues(rho.entries());
    let min = spectrum.min();
    if min < -PHYSICAL_TOLERANCE {
        return Err(QuantumError::NotPhysical(min));
    }
    let s: f64 = spectrum
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum();
    Ok(s.max(0.0))
}

pub fn nats_to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    rho.require_physical()?;
    sigma.require_physical()?;
    // pure argument: F = ⟨ψ|σ|ψ⟩
    if let Some(v) = rho.pure.as_ref() {
        return Ok(v.dotc(&(sigma.entries() * v)).re.clamp(0.0, 1.0));
    }
    if let Some(v) = sigma.pure.as_ref() {
        return Ok(v.dotc(&(rho.entries() * v)).re.clamp(0.0, 1.0));
    }
    let sr = psd_sqrt(rho.entries());
    let inner = &sr * sigma.entries() * &sr;
    // rounding noise on null eigenvalues would otherwise add ~√ε each
    let spectrum = hermitian_eigenvalues(&inner);
    let floor = 1e-14 * spectrum.max().max(0.0);
    let root_trace: f64 = spectrum
        .iter()
        .map(|&l| if l > floor { l.sqrt() } else { 0.0 })
        .sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}
