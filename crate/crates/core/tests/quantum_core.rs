use islands::quantum::linalg::{hermitian_eigenvalues, max_abs, CMatrix, CVector};
use islands::quantum::{entropy, partial_trace, schmidt, DensityMatrix, PureState, Tensor, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

fn random_density(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    let g = ginibre(rng, n, n);
    let m = &g * g.adjoint();
    let tr: C64 = m.diagonal().iter().sum();
    let mut m = m / tr;
    // symmetrize away rounding so the constructor's checks are exact
    m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    DensityMatrix::new(m, vec![n]).unwrap()
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    ginibre(rng, n, n).qr().q()
}

fn random_pure(rng: &mut ChaCha8Rng, na: usize, nb: usize) -> PureState {
    let v = CVector::from_fn(na * nb, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    PureState::new(v, vec![na, nb]).unwrap().normalized()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn partial_trace_recovers_factors(seed in any::<u64>(), na in 2usize..5, nb in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_density(&mut rng, na);
        let b = random_density(&mut rng, nb);
        let ab = a.tensor(&b);
        let ra = partial_trace(&ab, 0).unwrap();
        let rb = partial_trace(&ab, 1).unwrap();
        prop_assert!(max_abs(&(ra.entries() - a.entries())) < 1e-10);
        prop_assert!(max_abs(&(rb.entries() - b.entries())) < 1e-10);
    }

    #[test]
    fn entropy_unitarily_invariant(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(&mut rng, n);
        let u = random_unitary(&mut rng, n);
        let rotated = rho.conjugate_by(&u).unwrap();
        prop_assert!((entropy(&rho).unwrap() - entropy(&rotated).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn schmidt_weights_are_reduced_spectrum(seed in any::<u64>(), na in 2usize..6, nb in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_pure(&mut rng, na, nb);
        let d = schmidt(&psi).unwrap();
        let mut spectrum: Vec<f64> = hermitian_eigenvalues(partial_trace(&psi.density(), 0).unwrap().entries())
            .iter().copied().collect();
        spectrum.sort_by(|a, b| b.total_cmp(a));
        for (k, w) in d.weights.iter().enumerate() {
            prop_assert!((w - spectrum[k]).abs() < 1e-9);
        }
        prop_assert!((d.weights.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let recon = d.reconstruct();
        prop_assert!((psi.inner(&recon).unwrap().norm() - 1.0).abs() < 1e-9);
        for basis in [&d.left, &d.right] {
            for i in 0..basis.len() {
                for j in 0..basis.len() {
                    let ov = basis[i].dotc(&basis[j]);
                    let target = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((ov - C64::new(target, 0.0)).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn zero_entropy_iff_product(seed in any::<u64>(), mix in 0.0f64..1.0, product in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = if product {
            let a = random_pure(&mut rng, 3, 1);
            let b = random_pure(&mut rng, 1, 3);
            PureState::new(a.amplitudes().clone(), vec![3]).unwrap()
                .tensor(&PureState::new(b.amplitudes().clone(), vec![3]).unwrap())
        } else {
            // a blend of two orthogonal products, entangled for 0 < mix < 1
            let mut v = CVector::zeros(9);
            v[0] = C64::new(mix.sqrt(), 0.0);
            v[4] = C64::new((1.0 - mix).sqrt(), 0.0);
            PureState::new(v, vec![3, 3]).unwrap()
        };
        let s = entropy(&psi.reduced(0).unwrap()).unwrap();
        let top = schmidt(&psi).unwrap().largest_weight();
        prop_assert_eq!(s < 1e-12, top > 1.0 - 1e-9);
    }
}
