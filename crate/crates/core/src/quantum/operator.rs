use super::linalg::{kron, real, CMatrix};
use super::{PureState, QuantumError, Result, Tensor};

/// Square matrix acting on a space with declared local dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    entries: CMatrix,
    dims: Vec<usize>,
}

impl Operator {
    pub fn new(entries: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if !entries.is_square() || entries.nrows() != n {
            return Err(QuantumError::DimensionMismatch {
                expected: n,
                found: entries.nrows(),
            });
        }
        Ok(Self { entries, dims })
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Self {
            entries: CMatrix::identity(n, n),
            dims,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn dagger(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
            dims: self.dims.clone(),
        }
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Operator) -> Result<Self> {
        self.check(other.dims())?;
        Ok(Self {
            entries: &self.entries * &other.entries,
            dims: self.dims.clone(),
        })
    }

    pub fn plus(&self, other: &Operator) -> Result<Self> {
        self.check(other.dims())?;
        Ok(Self {
            entries: &self.entries + &other.entries,
            dims: self.dims.clone(),
        })
    }

    pub fn scaled(&self, factor: super::C64) -> Self {
        Self {
            entries: &self.entries * factor,
            dims: self.dims.clone(),
        }
    }

    pub fn commutator(&self, other: &Operator) -> Result<Self> {
        self.check(other.dims())?;
        Ok(Self {
            entries: super::linalg::commutator(&self.entries, &other.entries),
            dims: self.dims.clone(),
        })
    }

    /// `self |ψ⟩` without renormalization.
    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        self.check(psi.dims())?;
        PureState::new(&self.entries * psi.amplitudes(), self.dims.clone())
    }

    fn check(&self, dims: &[usize]) -> Result<()> {
        if self.dims != dims {
            return Err(QuantumError::DimensionMismatch {
                expected: self.dim(),
                found: dims.iter().product(),
            });
        }
        Ok(())
    }
}

impl Tensor for Operator {
    fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            entries: kron(&self.entries, &other.entries),
            dims,
        }
    }
}

/// Truncated ladder operator with `⟨n-1|a|n⟩ = √n`.
pub fn annihilation(cutoff: usize) -> Result<Operator> {
    if cutoff < 2 {
        return Err(QuantumError::InvalidCutoff { cutoff, minimum: 2 });
    }
    let mut m = CMatrix::zeros(cutoff, cutoff);
    for n in 1..cutoff {
        m[(n - 1, n)] = real((n as f64).sqrt());
    }
    Operator::new(m, vec![cutoff])
}

pub fn number_operator(cutoff: usize) -> Result<Operator> {
    if cutoff < 1 {
        return Err(QuantumError::InvalidCutoff { cutoff, minimum: 1 });
    }
    let m = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(cutoff, |n, _| real(n as f64)));
    Operator::new(m, vec![cutoff])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::max_abs;

    #[test]
    fn two_level_ladder() {
        let a = annihilation(2).unwrap();
        let m = a.matrix();
        assert_eq!(m[(0, 1)], real(1.0));
        assert_eq!(m.iter().filter(|z| z.norm() > 0.0).count(), 1);
        assert!(annihilation(1).is_err());
    }

    #[test]
    fn truncated_commutator() {
        let a = annihilation(20).unwrap();
        let comm = a.commutator(&a.dagger()).unwrap();
        let mut expected = CMatrix::identity(20, 20);
        // only the top level is corrupted: [a, a†]_{N-1,N-1} = -(N-1)
        expected[(19, 19)] = real(-19.0);
        assert!(max_abs(&(comm.matrix() - expected)) < 1e-12);
    }

    #[test]
    fn ladder_on_product() {
        let a = annihilation(3).unwrap().tensor(&Operator::identity(vec![3]));
        let psi = PureState::fock_pair(1, 0, 3, 3).unwrap();
        let out = a.apply(&psi).unwrap();
        assert_eq!(out, PureState::fock_pair(0, 0, 3, 3).unwrap());
    }

    #[test]
    fn identity_tensor_identity() {
        let id = Operator::identity(vec![2]).tensor(&Operator::identity(vec![3]));
        assert_eq!(id, Operator::identity(vec![2, 3]));
    }

    #[test]
    fn vacuum_tensor_vacuum() {
        let v = PureState::fock(0, 4).unwrap().tensor(&PureState::fock(0, 5).unwrap());
        assert_eq!(v, PureState::basis(0, vec![4, 5]).unwrap());
    }
}
