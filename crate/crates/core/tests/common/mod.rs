#![allow(dead_code)]

use islands::quantum::{CMatrix, DensityMatrix, PureState, C64};
use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    islands::rng::stream(seed, 0xC0FFEE)
}

fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Random two-qubit state of the given rank (induced Ginibre measure).
pub fn random_density(rng: &mut ChaCha8Rng, rank: usize) -> DensityMatrix {
    let g = ginibre(rng, 4, rank);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = m.map(|z| z / tr);
    let m = (&m + m.adjoint()).map(|z| z * 0.5);
    DensityMatrix::new(m, vec![2, 2]).unwrap()
}

/// Haar-random unitary via QR with the diagonal phases removed.
pub fn haar_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let qr = ginibre(rng, n, n).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = d / d.norm();
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn singlet() -> DensityMatrix {
    let s = 0.5f64.sqrt();
    let z = C64::new(0.0, 0.0);
    let v = DVector::from_vec(vec![z, C64::new(s, 0.0), C64::new(-s, 0.0), z]);
    DensityMatrix::from_pure(&PureState::new(v, vec![2, 2]).unwrap())
}

/// `w·singlet + (1 − w)·I/4`.
pub fn werner(w: f64) -> DensityMatrix {
    singlet().mix(&DensityMatrix::maximally_mixed(vec![2, 2]), w).unwrap()
}

/// Product of two pure qubits with Bloch angles `(θ, φ)` each.
pub fn product_state(a: (f64, f64), b: (f64, f64)) -> DensityMatrix {
    let qubit = |(th, ph): (f64, f64)| {
        DVector::from_vec(vec![C64::new((th / 2.0).cos(), 0.0), C64::from_polar((th / 2.0).sin(), ph)])
    };
    let v = islands::quantum::linalg::kron_vec(&qubit(a), &qubit(b));
    DensityMatrix::from_pure(&PureState::new(v, vec![2, 2]).unwrap())
}
