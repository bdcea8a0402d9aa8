use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{
    BellParams, ClicksParams, CountingParams, DecayFitParams, EinScanParams, EvolveParams, FitMethod, G2Params,
    ModeState, PipelineParams, Scenario, ScenarioConfig, StreamSpec, TomoFitParams, TomoSimParams,
};
use super::run::Execution;
use super::{HarnessError, Result};
use crate::modes::{
    amplitude_flow, biorthogonal_leakage, build_hamiltonian, ein_scan, simulate_trajectory, uniform_times,
    AmplitudePair, CandidateFamilies, ScanSettings,
};
use crate::photon::{
    coincidences, counting_stats, fit_decay, g2, parse_clickstream, simulate_clicks, synthetic_decay, waiting_times,
    write_clickstream, ClickStream, DecayFitOptions, DecayParams,
};
use crate::quantum::{
    annihilation, coherent_state, entropy, fidelity, partial_trace, schmidt, DensityMatrix, Operator, PureState,
    Tensor,
};
use crate::tomography::{
    born_probabilities, chsh, chsh_optimize, concurrence, entanglement_report, linear_inversion, mle_reconstruct,
    scheme_mub, scheme_sic, simulate_tomography, singlet_witness, witness_value, CellData, ChshAngles, CountTable,
    MeasurementScheme, MleOptions, SchemeKind, TomographyNoise, TomographyResult,
};

const SCHMIDT_THRESHOLD: f64 = 1e-10;
const DEFAULT_COINCIDENCE_WINDOW: f64 = 1e-8;

pub(crate) fn dispatch(config: &ScenarioConfig, base_dir: &Path, exec: &mut Execution) -> Result<Value> {
    let seed = config.seed.unwrap_or(0);
    match &config.scenario {
        Scenario::Evolve(p) => evolve(p, exec),
        Scenario::EinScan(p) => scan(p, seed, exec),
        Scenario::Clicks(p) => clicks(p, seed, exec),
        Scenario::G2(p) => g2_curve(p, seed, base_dir, exec),
        Scenario::Counting(p) => counting(p, seed, base_dir, exec),
        Scenario::DecayFit(p) => decay(p, seed, base_dir, exec),
        Scenario::TomoSim(p) => tomo_sim(p, seed, exec),
        Scenario::TomoFit(p) => tomo_fit(p, base_dir, exec),
        Scenario::Bell(p) => bell(p, exec),
        Scenario::FullPipeline(p) => pipeline(p, seed, exec),
    }
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn evolve(p: &EvolveParams, exec: &mut Execution) -> Result<Value> {
    let config = p.modes;
    let horizon = p.horizon.unwrap_or_else(|| config.exchange_period());
    let times = uniform_times(horizon, p.samples);

    let (factor_a, factor_b) = match p.initial {
        ModeState::Coherent { mu_a, mu_b } => {
            exec.ops.hit("coherent_state");
            (coherent_state(mu_a, config.cutoff_a)?.0, coherent_state(mu_b, config.cutoff_b)?.0)
        }
        ModeState::Fock { n_a, n_b } => (PureState::fock(n_a, config.cutoff_a)?, PureState::fock(n_b, config.cutoff_b)?),
    };
    exec.ops.hit("tensor");
    let psi0 = factor_a.tensor(&factor_b);
    exec.ops.hit("biorthogonal_leakage");
    let leakage = biorthogonal_leakage(&factor_a, &factor_b, &config)?;

    exec.ops.hit("evolve");
    exec.ops.hit("coherence_defect");
    exec.ops.hit("entropy");
    let trajectory = simulate_trajectory(&psi0, &config, &times)?;

    exec.ops.hit("annihilation");
    let a_op = annihilation(config.cutoff_a)?.tensor(&Operator::identity(vec![config.cutoff_b]));
    let b_op = Operator::identity(vec![config.cutoff_a]).tensor(&annihilation(config.cutoff_b)?);
    exec.ops.hit("build_hamiltonian");
    let h = build_hamiltonian(&config)?;

    let start = AmplitudePair::new(psi0.expectation(&a_op)?, psi0.expectation(&b_op)?);
    let energy0 = psi0.expectation(&h.full)?.re;
    exec.ops.hit("amplitude_flow");
    let mut moments = String::from("t,re_a,im_a,re_b,im_b,flow_re_a,flow_im_a,flow_re_b,flow_im_b\n");
    let mut flow_deviation: f64 = 0.0;
    let mut energy_drift: f64 = 0.0;
    for (state, &t) in trajectory.states.iter().zip(&times) {
        let (ma, mb) = (state.expectation(&a_op)?, state.expectation(&b_op)?);
        let flow = amplitude_flow(&start, &config, t);
        flow_deviation = flow_deviation.max((ma - flow.mu_a).norm()).max((mb - flow.mu_b).norm());
        energy_drift = energy_drift.max((state.expectation(&h.full)?.re - energy0).abs());
        let _ = writeln!(
            moments,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            t, ma.re, ma.im, mb.re, mb.im, flow.mu_a.re, flow.mu_a.im, flow.mu_b.re, flow.mu_b.im
        );
    }

    let last = trajectory.states.last().expect("at least one sample");
    exec.ops.hit("schmidt");
    let rank = schmidt(last)?.rank(SCHMIDT_THRESHOLD);
    exec.ops.hit("partial_trace");
    let final_entropy = entropy(&partial_trace(&last.density(), 0)?)?;
    let flow_end = amplitude_flow(&start, &config, *times.last().expect("at least one sample"));
    let predicted = coherent_state(flow_end.mu_a, config.cutoff_a)?
        .0
        .tensor(&coherent_state(flow_end.mu_b, config.cutoff_b)?.0);
    exec.ops.hit("fidelity");
    let final_fidelity = fidelity(&last.density(), &predicted.density())?;

    exec.csv("trajectory.csv", trajectory.to_csv());
    exec.csv("moments.csv", moments);
    exec.json("trajectory.json", &to_value(&trajectory));
    Ok(json!({
        "horizon": horizon,
        "samples": times.len(),
        "max_entropy": trajectory.max_entropy(),
        "mean_entropy": trajectory.mean_entropy(),
        "max_defect": trajectory.max_defect(),
        "max_top_level_population": trajectory.top_level_populations.iter().copied().fold(0.0, f64::max),
        "initial_leakage": leakage,
        "max_flow_deviation": flow_deviation,
        "max_energy_drift": energy_drift,
        "final_entropy": final_entropy,
        "final_schmidt_rank": rank,
        "final_flow_fidelity": final_fidelity,
    }))
}

fn scan(p: &EinScanParams, seed: u64, exec: &mut Execution) -> Result<Value> {
    let families = CandidateFamilies {
        coherent_amplitudes: p.coherent_amplitudes.clone(),
        fock_max_total: p.fock_max_total,
        random_products: p.random_products,
        seed,
    };
    let settings = ScanSettings { horizon: p.horizon, samples: p.samples };
    exec.ops.hit("ein_scan");
    let report = ein_scan(&p.modes, &families, &settings)?;
    exec.csv("ein_scan.csv", report.to_csv());
    exec.json("ein_scan.json", &to_value(&report));
    let label = |e: Option<&crate::modes::ScanEntry>| e.map(|e| e.label.clone());
    Ok(json!({
        "horizon": report.horizon,
        "samples": report.samples,
        "candidates": report.entries.len(),
        "coherent_ceiling": report.coherent_ceiling(),
        "excited_fock_floor": report.excited_fock_floor(),
        "coherent_stratum_is_minimal": report.coherent_stratum_is_minimal(),
        "lowest": label(report.entries.first()),
        "highest": label(report.entries.last()),
    }))
}

fn load_stream(spec: &StreamSpec, seed: u64, base_dir: &Path, exec: &mut Execution) -> Result<ClickStream> {
    match (&spec.input, &spec.source) {
        (Some(path), _) => {
            let text = exec.read_input(base_dir, path)?;
            Ok(parse_clickstream(&text)?)
        }
        (None, Some(source)) => {
            let duration = spec.duration.ok_or_else(|| HarnessError::Validation("duration is required".into()))?;
            exec.ops.hit("simulate_clicks");
            Ok(simulate_clicks(&source.build()?, spec.detector_pair()?, duration, seed)?)
        }
        (None, None) => Err(HarnessError::Validation("give exactly one of `input` and `source`".into())),
    }
}

fn stream_summary(stream: &ClickStream) -> Value {
    let detectors: Vec<Value> = stream
        .detector_ids()
        .into_iter()
        .map(|d| {
            let n = stream.count(d);
            json!({ "id": d, "events": n, "rate": n as f64 / stream.duration_s })
        })
        .collect();
    json!({ "events": stream.len(), "duration": stream.duration_s, "detectors": detectors })
}

fn clicks(p: &ClicksParams, seed: u64, exec: &mut Execution) -> Result<Value> {
    let stream = load_stream(&p.stream_spec(), seed, Path::new("."), exec)?;
    exec.text("clicks.txt", write_clickstream(&stream));

    exec.ops.hit("waiting_times");
    let mut waiting = Vec::new();
    for d in stream.detector_ids() {
        match waiting_times(&stream, d) {
            Ok(report) => {
                let mut csv = String::from("lower_s,upper_s,count\n");
                for (k, count) in report.histogram.counts.iter().enumerate() {
                    let (lo, hi) = (report.histogram.edges[k], report.histogram.edges[k + 1]);
                    let _ = writeln!(csv, "{lo:.16e},{hi:.16e},{count}");
                }
                exec.csv(&format!("waiting_{d}.csv"), csv);
                let mut v = to_value(&report);
                v.as_object_mut().expect("object").remove("histogram");
                waiting.push(v);
            }
            Err(e) => waiting.push(json!({ "detector": d, "skipped": e.to_string() })),
        }
    }

    let window = p.coincidence_window.unwrap_or(DEFAULT_COINCIDENCE_WINDOW);
    let pairs = if stream.detector_ids().len() >= 2 {
        exec.ops.hit("coincidences");
        Some(to_value(&coincidences(&stream, window)))
    } else {
        None
    };
    let mut summary = stream_summary(&stream);
    summary["waiting"] = Value::Array(waiting);
    summary["coincidences"] = pairs.unwrap_or(Value::Null);
    Ok(summary)
}

fn g2_curve(p: &G2Params, seed: u64, base_dir: &Path, exec: &mut Execution) -> Result<Value> {
    let stream = load_stream(&p.stream, seed, base_dir, exec)?;
    exec.ops.hit("g2");
    let curve = g2(&stream, &p.grid())?;
    let (g0, se) = curve.at_zero();
    exec.csv("g2.csv", curve.to_csv());
    exec.json("g2.json", &to_value(&curve));
    let mut summary = stream_summary(&stream);
    summary["g2_zero"] = json!(g0);
    summary["g2_zero_std_err"] = json!(se);
    summary["bins"] = json!(curve.lags.len());
    summary["bin_width"] = json!(curve.bin_width);
    summary["pair"] = json!(curve.detectors);
    Ok(summary)
}

fn counting(p: &CountingParams, seed: u64, base_dir: &Path, exec: &mut Execution) -> Result<Value> {
    let stream = load_stream(&p.stream, seed, base_dir, exec)?;
    exec.ops.hit("counting_stats");
    let stats = counting_stats(&stream, p.window)?;
    let mut csv = String::from("count,windows\n");
    for (k, n) in stats.histogram.iter().enumerate() {
        let _ = writeln!(csv, "{k},{n}");
    }
    exec.csv("counting.csv", csv);
    let mut summary = stream_summary(&stream);
    let mut stats_value = to_value(&stats);
    stats_value.as_object_mut().expect("object").remove("histogram");
    exec.json("counting.json", &to_value(&stats));
    summary["counting"] = stats_value;
    Ok(summary)
}

fn parse_series(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut series = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || (idx == 0 && line.starts_with(|c: char| c.is_ascii_alphabetic())) {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let parsed = match (cols.next(), cols.next(), cols.next()) {
            (Some(t), Some(n), None) => t.parse::<f64>().ok().zip(n.parse::<f64>().ok()),
            _ => None,
        };
        let row = parsed.ok_or_else(|| HarnessError::Parse(format!("line {}: expected `t,counts`", idx + 1)))?;
        series.push(row);
    }
    Ok(series)
}

fn decay(p: &DecayFitParams, seed: u64, base_dir: &Path, exec: &mut Execution) -> Result<Value> {
    let series = match (&p.input, &p.synthetic) {
        (Some(path), None) => parse_series(&exec.read_input(base_dir, path)?)?,
        (None, Some(s)) => {
            let mut params = match s.exponent {
                Some(exponent) => DecayParams::hyperbolic(s.amplitude, s.tau, exponent),
                None => DecayParams::exponential(s.amplitude, s.tau),
            };
            if let Some(m) = s.modulation {
                params = params.modulated(m);
            }
            let times = uniform_times(s.t_max, s.points);
            synthetic_decay(&params, &times, seed)
        }
        _ => return Err(HarnessError::Validation("give exactly one of `input` and `synthetic`".into())),
    };
    let options = DecayFitOptions { modulation: p.modulation, ..DecayFitOptions::default() };
    exec.ops.hit("fit_decay");
    let report = fit_decay(&series, &options)?;

    let best = report.best().and_then(|f| f.params);
    let mut csv = String::from("t,counts,best_fit\n");
    for &(t, y) in &series {
        let fit = best.map_or(f64::NAN, |b| b.eval(t));
        let _ = writeln!(csv, "{t:.16e},{y:.16e},{fit:.16e}");
    }
    exec.csv("decay_series.csv", csv);
    exec.json("decay_fit.json", &to_value(&report));

    let fits: Vec<Value> = report
        .fits
        .iter()
        .map(|f| json!({ "model": f.model.name(), "aic": f.aic, "params": f.params, "failure": f.failure }))
        .collect();
    Ok(json!({
        "points": report.points,
        "verdict": report.verdict,
        "best": report.best().map(|f| f.model.name()),
        "delta_aic": report.delta_aic,
        "fits": fits,
    }))
}

fn scheme_of(kind: SchemeKind, exec: &mut Execution) -> MeasurementScheme {
    match kind {
        SchemeKind::Mub => {
            exec.ops.hit("scheme_mub");
            scheme_mub()
        }
        SchemeKind::Sic => {
            exec.ops.hit("scheme_sic");
            scheme_sic()
        }
    }
}

/// Simulated table plus the largest deviation of its frequencies from the
/// exact Born probabilities.
fn simulate_table(
    rho: &DensityMatrix,
    kind: SchemeKind,
    shots: u64,
    noise: TomographyNoise,
    seed: u64,
    exec: &mut Execution,
) -> Result<(CountTable, f64)> {
    let scheme = scheme_of(kind, exec);
    exec.ops.hit("born_probabilities");
    let exact = born_probabilities(rho, &scheme)?;
    exec.ops.hit("simulate_tomography");
    let table = simulate_tomography(rho, &scheme, shots, noise, seed)?;
    let deviation = table
        .frequencies()
        .iter()
        .flatten()
        .zip(exact.probabilities.iter().flatten())
        .map(|(f, p)| (f - p).abs())
        .fold(0.0, f64::max);
    Ok((table, deviation))
}

fn tomo_sim(p: &TomoSimParams, seed: u64, exec: &mut Execution) -> Result<Value> {
    let rho = p.state.build()?;
    let noise = p.noise.build()?;
    let (table, deviation) = simulate_table(&rho, p.scheme, p.shots_per_setting, noise, seed, exec)?;
    exec.text("counts.json", table.to_json());
    Ok(json!({
        "scheme": p.scheme.name(),
        "shots_per_setting": p.shots_per_setting,
        "cells": table.counts.iter().map(Vec::len).sum::<usize>(),
        "white_fraction": noise.white_fraction,
        "max_frequency_deviation": deviation,
    }))
}

fn reconstruct(
    data: &impl CellData,
    method: FitMethod,
    mle: &MleOptions,
    exec: &mut Execution,
) -> Result<Vec<TomographyResult>> {
    let mut out = Vec::new();
    if matches!(method, FitMethod::LinearInversion | FitMethod::Both) {
        exec.ops.hit("linear_inversion");
        out.push(linear_inversion(data)?);
    }
    if matches!(method, FitMethod::Mle | FitMethod::Both) {
        exec.ops.hit("mle_reconstruct");
        out.push(mle_reconstruct(data, mle)?);
    }
    Ok(out)
}

/// Measures of the last (preferred) reconstruction plus fidelities.
fn fit_summary(results: &[TomographyResult], truth: Option<&DensityMatrix>, exec: &mut Execution) -> Result<Value> {
    let mut methods = Vec::new();
    for r in results {
        let name = serde_json::to_value(r.method).expect("method serializes");
        let file = format!("rho_{}.json", name.as_str().expect("method name"));
        exec.json(&file, &r.to_json());
        methods.push(json!({
            "method": name,
            "physical": r.physical,
            "min_eigenvalue": r.min_eigenvalue,
            "log_likelihood": r.log_likelihood,
            "iterations": r.iterations,
            "residual": r.residual,
        }));
    }
    let best = results.last().expect("at least one method");
    let mut summary = json!({ "reconstructions": methods, "method": best.method });
    if best.physical {
        exec.ops.hit("concurrence");
        exec.ops.hit("witness_value");
        exec.ops.hit("chsh_optimize");
        exec.ops.hit("partial_trace");
        exec.ops.hit("entropy");
        let report = entanglement_report(&best.rho_hat)?;
        summary["concurrence"] = json!(report.concurrence);
        summary["witness"] = json!(report.witness);
        summary["chsh"] = json!(report.chsh.value);
        summary["chsh_angles_deg"] = json!(degrees(&report.chsh.angles));
        summary["reduced_entropies"] = json!(report.reduced_entropies);
        if let Some(truth) = truth {
            exec.ops.hit("fidelity");
            summary["fidelity"] = json!(fidelity(&best.rho_hat, truth)?);
        }
    }
    Ok(summary)
}

fn tomo_fit(p: &TomoFitParams, base_dir: &Path, exec: &mut Execution) -> Result<Value> {
    let table = CountTable::from_json(&exec.read_input(base_dir, &p.input)?)?;
    scheme_of(table.kind, exec);
    let truth = p.truth.as_ref().map(|t| t.build()).transpose()?;
    let results = reconstruct(&table, p.method, &p.mle, exec)?;
    let mut summary = fit_summary(&results, truth.as_ref(), exec)?;
    summary["scheme"] = json!(table.kind.name());
    summary["shots_per_setting"] = json!(table.shots_per_setting);
    Ok(summary)
}

fn degrees(angles: &ChshAngles) -> [f64; 4] {
    [angles.a, angles.a_prime, angles.b, angles.b_prime].map(f64::to_degrees)
}

fn bell(p: &BellParams, exec: &mut Execution) -> Result<Value> {
    let rho = p.state.build()?;
    let angles = match p.angles_deg {
        Some([a, a_prime, b, b_prime]) => ChshAngles {
            a: a.to_radians(),
            a_prime: a_prime.to_radians(),
            b: b.to_radians(),
            b_prime: b_prime.to_radians(),
        },
        None => ChshAngles::canonical(),
    };
    exec.ops.hit("chsh");
    let s = chsh(&rho, &angles)?;
    exec.ops.hit("chsh_optimize");
    let best = chsh_optimize(&rho)?;
    exec.ops.hit("concurrence");
    let c = concurrence(&rho)?;
    exec.ops.hit("witness_value");
    let w = witness_value(&rho, &singlet_witness())?;
    Ok(json!({
        "chsh": s,
        "chsh_angles_deg": degrees(&angles),
        "chsh_optimized": best.value,
        "chsh_optimized_angles_deg": degrees(&best.angles),
        "concurrence": c,
        "witness": w,
    }))
}

fn pipeline(p: &PipelineParams, seed: u64, exec: &mut Execution) -> Result<Value> {
    let rho = p.state.build()?;
    let noise = p.noise.build()?;
    let (table, deviation) = simulate_table(&rho, p.scheme, p.shots_per_setting, noise, seed, exec)?;
    exec.text("counts.json", table.to_json());
    let results = reconstruct(&table, FitMethod::Both, &p.mle, exec)?;
    // what the simulated apparatus actually delivers
    let emitted = rho.mix(&DensityMatrix::maximally_mixed(vec![2, 2]), 1.0 - noise.white_fraction)?;
    let mut summary = fit_summary(&results, Some(&emitted), exec)?;
    if let Some(best) = results.last().filter(|r| r.physical) {
        summary["fidelity_to_source"] = json!(fidelity(&best.rho_hat, &rho)?);
    }
    summary["scheme"] = json!(p.scheme.name());
    summary["shots_per_setting"] = json!(p.shots_per_setting);
    summary["white_fraction"] = json!(noise.white_fraction);
    summary["max_frequency_deviation"] = json!(deviation);
    Ok(summary)
}
