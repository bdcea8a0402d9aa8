use islands::photon::*;
use islands::quantum::{DensityMatrix, PureState, C64};
use nalgebra::DVector;

const ACQ: f64 = 10.0;

fn ideal() -> [DetectorModel; 2] {
    [DetectorModel::ideal(); 2]
}

fn coherent_stream(seed: u64) -> ClickStream {
    simulate_clicks(&SourceModel::coherent(1e4), ideal(), ACQ, seed).unwrap()
}

fn thermal_stream(seed: u64) -> ClickStream {
    simulate_clicks(&SourceModel::thermal(1e4, 1e-3), ideal(), ACQ, seed).unwrap()
}

fn emitter_stream(seed: u64) -> ClickStream {
    simulate_clicks(&SourceModel::single_emitter(1e4, 5e-5), ideal(), ACQ, seed).unwrap()
}

fn singlet() -> DensityMatrix {
    let s = 0.5f64.sqrt();
    let amps = DVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0), C64::new(0.0, 0.0)]);
    DensityMatrix::from_pure(&PureState::new(amps, vec![2, 2]).unwrap())
}

fn gaps_s(stream: &ClickStream, detector: u8) -> Vec<f64> {
    stream
        .timestamps_ns(detector)
        .windows(2)
        .map(|w| (w[1] - w[0]) as f64 * 1e-9)
        .collect()
}

#[test]
fn coherent_total_counts_and_fano() {
    let s = simulate_clicks(&SourceModel::coherent(1000.0), ideal(), 100.0, 11).unwrap();
    let n = s.len() as f64;
    assert!((n - 1e5).abs() < 4.0 * 1e5f64.sqrt(), "total {n}");
    let c = counting_stats(&s, 0.1).unwrap();
    assert!((c.fano - 1.0).abs() < 4.0 * c.q_std_err, "fano {} ± {}", c.fano, c.q_std_err);
}

#[test]
fn zero_efficiency_leaves_only_darks() {
    let det = DetectorModel { efficiency: 0.0, dark_rate: 50.0, dead_time: 0.0 };
    let clean = DetectorModel { efficiency: 0.0, ..DetectorModel::ideal() };
    for source in [SourceModel::coherent(1e4), SourceModel::thermal(1e4, 1e-3), SourceModel::pair_source(1e4, singlet())] {
        let none = simulate_clicks(&source, [clean; 2], 1.0, 3).unwrap();
        assert!(none.is_empty());
        let darks = simulate_clicks(&source, [det; 2], 20.0, 3).unwrap();
        let expected = 2.0 * 50.0 * 20.0;
        assert!((darks.len() as f64 - expected).abs() < 4.0 * expected.sqrt());
    }
}

#[test]
fn single_emitter_never_clicks_twice_at_once() {
    let s = emitter_stream(5);
    assert_eq!(coincidences(&s, 0.0).raw, 0);
    // within a tenth of a lifetime, true pairs are far rarer than chance
    let r = coincidences(&s, 5e-6);
    assert!((r.raw as f64) < 0.1 * r.accidental, "{r:?}");
}

#[test]
fn waiting_time_exponentiality() {
    let c = waiting_times(&coherent_stream(21), 0).unwrap();
    assert!(c.exponential, "{} vs {}", c.ks_distance, c.ks_critical_99);
    assert!((c.rate - 5e3).abs() < 4.0 * 5e3 / (c.gaps as f64).sqrt());
    let t = waiting_times(&thermal_stream(22), 0).unwrap();
    assert!(!t.exponential, "{} vs {}", t.ks_distance, t.ks_critical_99);
}

#[test]
fn mandel_q_trichotomy() {
    let q = |s: &ClickStream| counting_stats(s, 1e-3).unwrap();
    let (e, c, t) = (q(&emitter_stream(31)), q(&coherent_stream(32)), q(&thermal_stream(33)));
    assert!(c.mandel_q.abs() < 4.0 * c.q_std_err, "coherent Q {} ± {}", c.mandel_q, c.q_std_err);
    assert!(e.mandel_q < -4.0 * e.q_std_err, "emitter Q {} ± {}", e.mandel_q, e.q_std_err);
    assert!(t.mandel_q > 4.0 * t.q_std_err, "thermal Q {} ± {}", t.mandel_q, t.q_std_err);
    let p = c.poisson_p_value.unwrap();
    assert!(p > 1e-3, "coherent χ² p = {p}");
    assert!(t.poisson_p_value.unwrap() < 1e-6);
}

#[test]
fn g2_trichotomy_and_ordering() {
    let e = g2(&emitter_stream(41), &LagGrid::new(4e-4, 2e-6)).unwrap();
    let c = g2(&coherent_stream(42), &LagGrid::new(1e-2, 1e-4)).unwrap();
    let t = g2(&thermal_stream(43), &LagGrid::new(1e-2, 1e-4)).unwrap();
    let (ge, se) = e.at_zero();
    let (gc, sc) = c.at_zero();
    let (gt, st) = t.at_zero();
    assert!(ge < 0.1, "emitter g2(0) = {ge}");
    assert!((gc - 1.0).abs() < 0.05, "coherent g2(0) = {gc}");
    assert!((gt - 2.0).abs() < 0.1, "thermal g2(0) = {gt}");
    assert!(gc - ge > 5.0 * sc.max(se));
    assert!(gt - gc > 5.0 * st.max(sc));
    assert_eq!(e.classify(3.0), Bunching::AntiBunched);
    assert_eq!(c.classify(3.0), Bunching::Poissonian);
    assert_eq!(t.classify(3.0), Bunching::Bunched);
}

#[test]
fn g2_tends_to_one_at_long_lags() {
    let cases = [
        (emitter_stream(51), 5e-6, 1e-3),
        (coherent_stream(52), 1e-4, 1e-2),
        (thermal_stream(53), 5e-4, 2e-2),
    ];
    for (s, w, lag) in cases {
        let curve = g2(&s, &LagGrid::new(lag, w)).unwrap();
        let edge = [0, curve.lags.len() - 1];
        for k in edge {
            let z = (curve.g2[k] - 1.0) / curve.std_err[k];
            assert!(z.abs() < 3.0, "lag {} g2 {} z {z}", curve.lags[k], curve.g2[k]);
        }
    }
}

#[test]
fn thinning_matches_lower_rate() {
    let thinned_det = DetectorModel { efficiency: 0.4, ..DetectorModel::ideal() };
    let thinned = simulate_clicks(&SourceModel::coherent(1e4), [thinned_det; 2], ACQ, 61).unwrap();
    let direct = simulate_clicks(&SourceModel::coherent(4e3), ideal(), ACQ, 62).unwrap();
    let (d, p) = ks_two_sample(&gaps_s(&thinned, 0), &gaps_s(&direct, 0));
    assert!(p > 6.3e-5, "KS distance {d}, p {p}");
}

#[test]
fn dead_time_is_respected_exactly() {
    let det = DetectorModel { efficiency: 0.9, dark_rate: 200.0, dead_time: 3.3e-5 };
    for source in [SourceModel::coherent(3e4), SourceModel::thermal(3e4, 1e-4)] {
        let s = simulate_clicks(&source, [det; 2], 2.0, 71).unwrap();
        for d in 0..2 {
            for w in s.timestamps_ns(d).windows(2) {
                assert!(w[1] - w[0] >= 33_000);
            }
        }
    }
}

#[test]
fn streams_are_reproducible() {
    for source in [
        SourceModel::coherent(2e3),
        SourceModel::thermal(2e3, 1e-3),
        SourceModel::single_emitter(2e3, 1e-4),
        SourceModel::pair_source(2e3, singlet()),
    ] {
        let det = DetectorModel { efficiency: 0.7, dark_rate: 10.0, dead_time: 1e-6 };
        let a = simulate_clicks(&source, [det; 2], 1.0, 81).unwrap();
        let b = simulate_clicks(&source, [det; 2], 1.0, 81).unwrap();
        let c = simulate_clicks(&source, [det; 2], 1.0, 82).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.events, c.events);
        a.validate().unwrap();
    }
}

#[test]
fn pair_source_coincidences_match_pairs() {
    let s = simulate_clicks(&SourceModel::pair_source(5e3, singlet()), ideal(), 2.0, 91).unwrap();
    let pairs = s.count(0);
    assert_eq!(pairs, s.count(1));
    let r = coincidences(&s, 2e-9);
    assert!((r.corrected - pairs as f64).abs() < 4.0 * r.std_err.max(1.0), "{r:?} vs {pairs}");
}

#[test]
fn independent_streams_have_only_accidentals() {
    let a = simulate_clicks(&SourceModel::coherent(2e4), ideal(), 5.0, 101).unwrap();
    let b = simulate_clicks(&SourceModel::coherent(2e4), ideal(), 5.0, 102).unwrap();
    let s = ClickStream::combine(&a, &b);
    let r = coincidences(&s, 1e-6);
    let diff = r.raw as f64 - r.accidental;
    assert!(diff.abs() < 4.0 * r.accidental.sqrt(), "{r:?}");
}

#[test]
fn decay_fit_recovers_exponential() {
    let times: Vec<f64> = (0..120).map(|k| k as f64 * 0.05).collect();
    let truth = DecayParams::exponential(2e3, 1.5);
    let r = fit_decay(&synthetic_decay(&truth, &times, 7), &DecayFitOptions::default()).unwrap();
    assert_eq!(r.verdict, DecayVerdict::Selected(DecayModel::Exponential), "{:?}", r.delta_aic);
    let p = r.best().unwrap().params.unwrap();
    assert!((p.tau / 1.5 - 1.0).abs() < 0.05, "tau {}", p.tau);
}

#[test]
fn decay_fit_recovers_hyperbolic() {
    let times: Vec<f64> = (0..200).map(|k| k as f64 * 0.1).collect();
    let truth = DecayParams::hyperbolic(1e4, 1.0, 2.0);
    let r = fit_decay(&synthetic_decay(&truth, &times, 8), &DecayFitOptions::default()).unwrap();
    assert_eq!(r.verdict, DecayVerdict::Selected(DecayModel::Hyperbolic));
    let p = r.best().unwrap().params.unwrap();
    assert!((p.exponent.unwrap() / 2.0 - 1.0).abs() < 0.1, "p {:?}", p.exponent);
}

#[test]
fn decay_fit_constant_is_indeterminate() {
    let series: Vec<(f64, f64)> = (0..40).map(|k| (k as f64, 250.0)).collect();
    for modulation in [false, true] {
        let r = fit_decay(&series, &DecayFitOptions { modulation, ..Default::default() }).unwrap();
        assert_eq!(r.verdict, DecayVerdict::Indeterminate);
    }
}

#[test]
fn decay_fit_finds_modulation_when_asked() {
    let times: Vec<f64> = (0..300).map(|k| k as f64 * 0.05).collect();
    let truth = DecayParams::hyperbolic(5e3, 2.0, 1.5).modulated(Modulation { depth: 0.2, frequency: 3.0, phase: 0.4 });
    let opts = DecayFitOptions { modulation: true, ..Default::default() };
    let r = fit_decay(&synthetic_decay(&truth, &times, 9), &opts).unwrap();
    assert_eq!(r.verdict, DecayVerdict::Selected(DecayModel::ModulatedHyperbolic));
    let m = r.best().unwrap().params.unwrap().modulation.unwrap();
    assert!((m.frequency - 3.0).abs() < 0.05);
}

#[test]
fn click_file_round_trip() {
    let det = DetectorModel { efficiency: 0.8, dark_rate: 100.0, dead_time: 5e-7 };
    let s = simulate_clicks(&SourceModel::thermal(5e3, 1e-3), [det; 2], 0.5, 111).unwrap();
    let back = parse_clickstream(&write_clickstream(&s)).unwrap();
    assert_eq!(back.events, s.events);
    assert_eq!(back.duration_s, s.duration_s);
}
