//! Dense complex matrix helpers shared by every module.
//!
//! Hermitian eigendecomposition is the single spectral kernel; matrix
//! functions (square roots, exponentials) are all routed through it.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Eigenvalues (ascending) and matching column eigenvectors of a Hermitian
/// matrix. Only the Hermitian part of `m` is used.
pub fn hermitian_eigen(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let n = m.nrows();
    let sym = (m + m.adjoint()) * real(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> DVector<f64> {
    hermitian_eigen(m).0
}

/// Applies a real scalar function to the spectrum of a Hermitian matrix.
pub fn hermitian_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let n = values.len();
    let mut scaled = vectors.clone();
    for k in 0..n {
        let fk = real(f(values[k]));
        for z in scaled.column_mut(k).iter_mut() {
            *z *= fk;
        }
    }
    scaled * vectors.adjoint()
}

/// Positive square root of a positive-semidefinite Hermitian matrix; tiny
/// negative eigenvalues are clipped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    hermitian_map(m, |x| x.max(0.0).sqrt())
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.adjoint())) <= tol
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Half the trace norm of `a - b`, for Hermitian arguments.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    0.5 * hermitian_eigenvalues(&(a - b)).iter().map(|x| x.abs()).sum::<f64>()
}

/// ⟨u|v⟩ with the first argument conjugated.
pub fn inner(u: &CVector, v: &CVector) -> C64 {
    u.dotc(v)
}

pub fn outer(u: &CVector, v: &CVector) -> CMatrix {
    u * v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_ascending() {
        let m = CMatrix::from_row_slice(2, 2, &[real(2.0), I, -I, real(2.0)]);
        let (v, _) = hermitian_eigen(&m);
        assert!((v[0] - 1.0).abs() < 1e-12);
        assert!((v[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt_squares_back() {
        let m = CMatrix::from_row_slice(2, 2, &[real(2.0), c(0.5, 0.5), c(0.5, -0.5), real(1.0)]);
        let s = psd_sqrt(&m);
        assert!(max_abs(&(&s * &s - &m)) < 1e-12);
    }
}
