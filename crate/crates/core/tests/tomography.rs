mod common;

use common::*;
use islands::quantum::linalg::{kron, trace_distance};
use islands::quantum::{fidelity, DensityMatrix};
use islands::tomography::*;
use proptest::prelude::*;

fn schemes() -> [MeasurementScheme; 2] {
    [scheme_mub(), scheme_sic()]
}

/// Largest `|S|` over analyzers in the x–z plane: twice the Euclidean norm of
/// the singular values of the 2×2 z/x correlation block.
fn chsh_closed_form(rho: &DensityMatrix) -> f64 {
    let axes = [pauli(3), pauli(1)];
    let t = nalgebra::Matrix2::from_fn(|i, j| rho.expectation(&kron(&axes[i], &axes[j])).re);
    let sv = t.svd(false, false).singular_values;
    2.0 * (sv[0] * sv[0] + sv[1] * sv[1]).sqrt()
}

#[test]
fn design_matrices_have_full_rank() {
    for s in schemes() {
        assert_eq!(s.design_rank(), 16, "{}", s.kind.name());
        assert_eq!(s.design_matrix().nrows(), s.cells());
    }
}

#[test]
fn linear_inversion_round_trip_on_random_states() {
    let mut r = rng(1);
    for s in schemes() {
        for k in 0..200 {
            let rho = random_density(&mut r, 1 + k % 4);
            let p = born_probabilities(&rho, &s).unwrap();
            let est = linear_inversion(&p).unwrap();
            let d = trace_distance(est.rho_hat.entries(), rho.entries());
            assert!(d < 1e-9, "{} state {k}: {d}", s.kind.name());
        }
    }
}

#[test]
fn singlet_is_anticorrelated_in_every_pauli_basis() {
    let s = scheme_mub();
    let p = born_probabilities(&singlet(), &s).unwrap();
    for setting in [0, 4, 8] {
        assert!(p.probabilities[setting][0].abs() < 1e-15);
        assert!(p.probabilities[setting][3].abs() < 1e-15);
    }
}

#[test]
fn product_probabilities_factorize() {
    let mut r = rng(2);
    let a = random_density(&mut r, 4);
    let b = random_density(&mut r, 4);
    let (ra, rb) = (
        islands::quantum::partial_trace(&a, 0).unwrap(),
        islands::quantum::partial_trace(&b, 1).unwrap(),
    );
    let rho = DensityMatrix::new(kron(ra.entries(), rb.entries()), vec![2, 2]).unwrap();
    for s in schemes() {
        let p = born_probabilities(&rho, &s).unwrap();
        for setting in 0..s.settings() {
            let n = s.local.len();
            let (la, lb) = (&s.local[setting / n], &s.local[setting % n]);
            let m = lb.outcomes.len();
            for o in 0..s.outcomes_per_setting() {
                let pa = ra.expectation(&la.outcomes[o / m].1).re;
                let pb = rb.expectation(&lb.outcomes[o % m].1).re;
                assert!((p.probabilities[setting][o] - pa * pb).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn simulated_counts_close_per_setting() {
    let t = simulate_tomography(&singlet(), &scheme_mub(), 777, TomographyNoise::none(), 3).unwrap();
    t.validate().unwrap();
    assert!(t.counts.iter().all(|row| row.iter().sum::<u64>() == 777));
}

#[test]
fn pure_noise_is_uniform() {
    let n = 40_000u64;
    for s in schemes() {
        let k = s.outcomes_per_setting() as f64;
        let t = simulate_tomography(&singlet(), &s, n, TomographyNoise { white_fraction: 1.0 }, 5).unwrap();
        let sd = (n as f64 * (1.0 / k) * (1.0 - 1.0 / k)).sqrt();
        for row in &t.counts {
            for &c in row {
                assert!((c as f64 - n as f64 / k).abs() < 4.0 * sd);
            }
        }
    }
}

#[test]
fn singlet_never_shows_equal_outcomes() {
    let n = 1_000_000u64;
    let t = simulate_tomography(&singlet(), &scheme_mub(), n, TomographyNoise::none(), 6).unwrap();
    for setting in [0, 4, 8] {
        for o in [0, 3] {
            let f = t.counts[setting][o] as f64 / n as f64;
            assert!(f < 1e-5 + 4.0 * (1e-5 / n as f64).sqrt());
        }
    }
}

#[test]
fn exact_singlet_inverts_to_unit_concurrence() {
    for s in schemes() {
        let est = linear_inversion(&born_probabilities(&singlet(), &s).unwrap()).unwrap();
        assert!((concurrence(&est.rho_hat).unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn mle_repairs_unphysical_linear_inversion() {
    let rho = product_state((0.0, 0.0), (0.0, 0.0));
    let t = simulate_tomography(&rho, &scheme_mub(), 30, TomographyNoise::none(), 12).unwrap();
    let li = linear_inversion(&t).unwrap();
    assert!(!li.physical, "min eigenvalue {}", li.min_eigenvalue);
    let ml = mle_reconstruct(&t, &MleOptions::default()).unwrap();
    assert!(ml.physical);
    assert!(ml.min_eigenvalue > -1e-10);
    assert!((ml.rho_hat.entries().trace().re - 1.0).abs() < 1e-10);
}

#[test]
fn mle_matches_linear_inversion_on_exact_data() {
    let mut r = rng(7);
    for s in schemes() {
        for _ in 0..5 {
            let rho = random_density(&mut r, 4);
            let p = born_probabilities(&rho, &s).unwrap();
            let li = linear_inversion(&p).unwrap();
            let ml = mle_reconstruct(&p, &MleOptions::default()).unwrap();
            let d = trace_distance(li.rho_hat.entries(), ml.rho_hat.entries());
            assert!(d < 1e-7, "{}: {d} after {} iterations", s.kind.name(), ml.iterations);
        }
    }
}

#[test]
fn mle_likelihood_never_decreases() {
    let mut r = rng(8);
    for s in schemes() {
        for seed in 0..5 {
            let rho = random_density(&mut r, 1 + seed as usize % 4);
            let t = simulate_tomography(&rho, &s, 500, TomographyNoise { white_fraction: 0.05 }, seed).unwrap();
            let ml = mle_reconstruct(&t, &MleOptions::default()).unwrap();
            for w in ml.history.windows(2) {
                assert!(w[1] >= w[0], "{} < {}", w[1], w[0]);
            }
        }
    }
}

#[test]
fn mle_survives_empty_cells() {
    let t = simulate_tomography(&singlet(), &scheme_mub(), 1000, TomographyNoise::none(), 9).unwrap();
    assert!(t.counts.iter().flatten().any(|&c| c == 0));
    let ml = mle_reconstruct(&t, &MleOptions::default()).unwrap();
    assert!(ml.log_likelihood.is_finite());
    assert!(ml.physical);
}

#[test]
fn mle_error_shrinks_with_shots() {
    let truth = werner(0.9);
    let mut means = Vec::new();
    for shots in [100u64, 1_000, 10_000, 100_000] {
        let mut total = 0.0;
        for rep in 0..20u64 {
            let t = simulate_tomography(&truth, &scheme_mub(), shots, TomographyNoise::none(), 1000 * shots + rep).unwrap();
            let ml = mle_reconstruct(&t, &MleOptions::default()).unwrap();
            total += trace_distance(ml.rho_hat.entries(), truth.entries());
        }
        means.push(total / 20.0);
    }
    for w in means.windows(2) {
        assert!(w[1] < w[0], "{means:?}");
    }
}

#[test]
fn werner_concurrence_closed_form() {
    for k in 0..=20 {
        let w = k as f64 / 20.0;
        let expected = ((3.0 * w - 1.0) / 2.0).max(0.0);
        assert!((concurrence(&werner(w)).unwrap() - expected).abs() < 1e-9, "w = {w}");
    }
    assert!(concurrence(&werner(1.0 / 3.0)).unwrap().abs() < 1e-9);
    assert!((concurrence(&werner(0.5)).unwrap() - 0.25).abs() < 1e-9);
}

#[test]
fn concurrence_is_local_unitary_invariant() {
    let mut r = rng(10);
    for k in 0..100 {
        let rho = random_density(&mut r, 1 + k % 4);
        let u = kron(&haar_unitary(&mut r, 2), &haar_unitary(&mut r, 2));
        let c0 = concurrence(&rho).unwrap();
        let c1 = concurrence(&rho.conjugate_by(&u).unwrap()).unwrap();
        assert!((c0 - c1).abs() < 1e-9, "{c0} vs {c1}");
    }
}

#[test]
fn product_states_have_zero_concurrence_and_nonnegative_witness() {
    let w = singlet_witness();
    let n = 12;
    let mut lowest = f64::INFINITY;
    for i in 0..=n {
        for j in 0..(2 * n) {
            for k in 0..=n {
                for l in 0..(2 * n) {
                    let a = (std::f64::consts::PI * i as f64 / n as f64, std::f64::consts::PI * j as f64 / n as f64);
                    let b = (std::f64::consts::PI * k as f64 / n as f64, std::f64::consts::PI * l as f64 / n as f64);
                    let rho = product_state(a, b);
                    lowest = lowest.min(witness_value(&rho, &w).unwrap());
                    if (i + j + k + l) % 97 == 0 {
                        assert!(concurrence(&rho).unwrap() < 1e-9);
                    }
                }
            }
        }
    }
    assert!(lowest > -1e-12, "{lowest}");
    assert!(lowest < 1e-12);
}

#[test]
fn canonical_angles_reach_tsirelson() {
    let s = chsh(&singlet(), &ChshAngles::canonical()).unwrap();
    assert!((s - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    let opt = chsh_optimize(&singlet()).unwrap();
    assert!((opt.value - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    assert!((chsh(&singlet(), &opt.angles).unwrap() - opt.value).abs() < 1e-12);
}

#[test]
fn product_states_respect_classical_bound() {
    let n = 6;
    for i in 0..=n {
        for j in 0..n {
            for k in 0..=n {
                let pi = std::f64::consts::PI;
                let rho = product_state(
                    (pi * i as f64 / n as f64, 2.0 * pi * j as f64 / n as f64),
                    (pi * k as f64 / n as f64, 0.3),
                );
                let s = chsh_optimize(&rho).unwrap();
                assert!(s.value.abs() <= 2.0 + 1e-6, "{}", s.value);
            }
        }
    }
}

#[test]
fn werner_violates_exactly_above_threshold() {
    let threshold = 0.5f64.sqrt();
    for w in [0.0, 0.3, 0.6, threshold - 1e-6, threshold + 1e-6, 0.8, 0.95, 1.0] {
        let s = chsh_optimize(&werner(w)).unwrap().value.abs();
        assert!((s - 2.0 * 2f64.sqrt() * w).abs() < 1e-9);
        assert_eq!(s > 2.0, w > threshold, "w = {w}, S = {s}");
    }
}

#[test]
fn count_table_json_uses_labels() {
    let t = simulate_tomography(&singlet(), &scheme_mub(), 10, TomographyNoise::none(), 1).unwrap();
    let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
    assert_eq!(v["scheme"], "mub");
    assert_eq!(v["shots_per_setting"], 10);
    assert!(v["counts"]["XZ"]["+-"].is_u64());
    let s = simulate_tomography(&singlet(), &scheme_sic(), 10, TomographyNoise::none(), 1).unwrap();
    let v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
    assert!(v["counts"]["sic"]["03"].is_u64());
}

#[test]
fn finite_sample_singlet_is_certified() {
    let f = 0.02;
    let t = simulate_tomography(&singlet(), &scheme_mub(), 100_000, TomographyNoise { white_fraction: f }, 2024).unwrap();
    let ml = mle_reconstruct(&t, &MleOptions::default()).unwrap();
    let report = entanglement_report(&ml.rho_hat).unwrap();
    let emitted = werner(1.0 - f);
    let to_truth = fidelity(&ml.rho_hat, &emitted).unwrap();
    let to_singlet = fidelity(&ml.rho_hat, &singlet()).unwrap();
    println!("F(truth) {to_truth} F(singlet) {to_singlet} C {} S {} W {}", report.concurrence, report.chsh.value, report.witness);
    assert!(to_truth >= 0.99);
    // white noise alone caps the overlap with the ideal singlet at 1 − 3f/4
    assert!((to_singlet - (1.0 - 0.75 * f)).abs() < 2e-3);
    assert!(report.concurrence >= 0.95);
    assert!(report.chsh.value.abs() >= 2.7);
    assert!(report.witness <= -0.4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn measures_stay_in_range(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = random_density(&mut rng(seed), rank);
        let c = concurrence(&rho).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
        let s = chsh_optimize(&rho).unwrap();
        prop_assert!(s.value.abs() <= 2.0 * 2f64.sqrt() + 1e-9);
        prop_assert!((s.value.abs() - chsh_closed_form(&rho)).abs() < 1e-7);
    }

    #[test]
    fn born_rows_are_distributions(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = random_density(&mut rng(seed), rank);
        for s in schemes() {
            let p = born_probabilities(&rho, &s).unwrap();
            for row in &p.probabilities {
                prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-10);
                prop_assert!(row.iter().all(|&v| v > -1e-12));
            }
        }
    }
}
