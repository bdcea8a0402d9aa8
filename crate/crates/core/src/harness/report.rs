use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use super::run::{read_manifest, SUMMARY};
use super::{HarnessError, Result};
use crate::photon::Bunching;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub scenario: Option<String>,
    pub status: String,
    pub lines: Vec<String>,
    pub summary: Value,
}

impl Report {
    pub fn text(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}

/// One decimal with a trailing `.0` dropped: `2.03 → "2"`, `-0.04 → "0"`.
fn rounded(x: f64) -> String {
    let s = format!("{x:.1}");
    let s = s.strip_suffix(".0").unwrap_or(&s);
    if s == "-0" {
        "0".into()
    } else {
        s.to_owned()
    }
}

fn num(v: &Value, key: &str) -> f64 {
    v.get(key).and_then(Value::as_f64).unwrap_or(f64::NAN)
}

fn chsh_line(label: &str, s: f64) -> String {
    let verdict = if s.abs() > 2.0 { "> 2: local realism violated" } else { "≤ 2: no violation" };
    format!("{label} = {s:.6} ({verdict})")
}

fn witness_line(w: f64) -> String {
    let verdict = if w < 0.0 { "< 0: entanglement detected" } else { "≥ 0: inconclusive" };
    format!("witness = {w:.6} ({verdict})")
}

fn stream_lines(s: &Value, out: &mut Vec<String>) {
    out.push(format!("{} events over {} s", s["events"], num(s, "duration")));
    for d in s["detectors"].as_array().into_iter().flatten() {
        out.push(format!("detector {}: {} events, rate {:.6e} Hz", d["id"], d["events"], num(d, "rate")));
    }
}

fn entanglement_lines(s: &Value, out: &mut Vec<String>) {
    let reference = if s["scenario"] == "full_pipeline" { "emitted" } else { "reference" };
    if let Some(f) = s.get("fidelity").and_then(Value::as_f64) {
        out.push(format!("fidelity to the {reference} state = {f:.6}"));
    }
    if let Some(f) = s.get("fidelity_to_source").and_then(Value::as_f64) {
        out.push(format!("fidelity to the noiseless source state = {f:.6}"));
    }
    if s.get("concurrence").is_none() {
        out.push("reconstruction is not positive semidefinite; entanglement measures skipped".into());
        return;
    }
    out.push(format!("concurrence = {:.6}", num(s, "concurrence")));
    out.push(chsh_line("S", num(s, "chsh")));
    out.push(witness_line(num(s, "witness")));
}

fn scenario_lines(kind: &str, s: &Value, sigma: f64) -> Vec<String> {
    let mut out = Vec::new();
    match kind {
        "evolve" => {
            out.push(format!(
                "reduced entropy: max = {:.3e} nats, mean = {:.3e} nats over {} samples",
                num(s, "max_entropy"),
                num(s, "mean_entropy"),
                s["samples"]
            ));
            out.push(format!("max coherence defect = {:.3e}", num(s, "max_defect")));
            out.push(format!("max deviation from the amplitude flow = {:.3e}", num(s, "max_flow_deviation")));
            out.push(format!("initial biorthogonal leakage = {:.3e}", num(s, "initial_leakage")));
            out.push(format!("final Schmidt rank = {}", s["final_schmidt_rank"]));
        }
        "ein_scan" => {
            out.push(format!(
                "coherent ceiling = {:.3e} nats, excited Fock floor = {:.3e} nats over {} candidates",
                num(s, "coherent_ceiling"),
                num(s, "excited_fock_floor"),
                s["candidates"]
            ));
            let minimal = s["coherent_stratum_is_minimal"].as_bool().unwrap_or(false);
            out.push(format!("coherent products rank lowest: {}", if minimal { "yes" } else { "no" }));
        }
        "clicks" => {
            stream_lines(s, &mut out);
            for w in s["waiting"].as_array().into_iter().flatten() {
                if let Some(reason) = w.get("skipped") {
                    out.push(format!("detector {} waiting times skipped: {}", w["detector"], reason));
                    continue;
                }
                let verdict = if w["exponential"].as_bool() == Some(true) { "exponential" } else { "not exponential" };
                out.push(format!(
                    "detector {} waiting times: KS D = {:.4} (p = {:.3e}, {verdict} at 1%)",
                    w["detector"],
                    num(w, "ks_distance"),
                    num(w, "ks_p_value")
                ));
            }
            if let Some(c) = s.get("coincidences").filter(|c| !c.is_null()) {
                out.push(format!(
                    "coincidences: raw {}, accidental {:.3}, corrected {:.3} ± {:.3}",
                    c["raw"],
                    num(c, "accidental"),
                    num(c, "corrected"),
                    num(c, "std_err")
                ));
            }
        }
        "g2" => {
            stream_lines(s, &mut out);
            let (g, se) = (num(s, "g2_zero"), num(s, "g2_zero_std_err"));
            let class = Bunching::from_estimate(g, se, sigma);
            out.push(format!("g2(0) = {g:.4} ± {se:.4} ≈ {} ({})", rounded(g), class.label()));
        }
        "counting" => {
            stream_lines(s, &mut out);
            let c = &s["counting"];
            let (q, se) = (num(c, "mandel_q"), num(c, "q_std_err"));
            let class = if q > sigma * se {
                "super-Poissonian"
            } else if -q > sigma * se {
                "sub-Poissonian"
            } else {
                "Poissonian"
            };
            out.push(format!("Q = {q:.5} ± {se:.5} ≈ {} ({class})", rounded(q)));
            out.push(format!("Fano factor = {:.5}", num(c, "fano")));
            match c["poisson_p_value"].as_f64() {
                Some(p) => out.push(format!("Poisson χ² = {:.3} on {} dof, p = {p:.3e}", num(c, "chi_square"), c["dof"])),
                None => out.push("Poisson χ² test not applicable".into()),
            }
        }
        "decay_fit" => {
            match s["best"].as_str() {
                Some(best) if s["verdict"] != "indeterminate" => {
                    let delta = s["delta_aic"].as_f64().map_or("n/a".into(), |d| format!("{d:.3}"));
                    out.push(format!("best model: {best} (ΔAIC to runner-up = {delta})"));
                }
                _ => out.push("model selection indeterminate".into()),
            }
            for f in s["fits"].as_array().into_iter().flatten() {
                let p = &f["params"];
                if p.is_null() {
                    out.push(format!("{}: failed", f["model"].as_str().unwrap_or("?")));
                    continue;
                }
                let mut line = format!(
                    "{}: AIC = {:.3}, I0 = {:.6e}, tau = {:.6e}",
                    f["model"].as_str().unwrap_or("?"),
                    num(f, "aic"),
                    num(p, "amplitude"),
                    num(p, "tau")
                );
                if let Some(e) = p["exponent"].as_f64() {
                    line.push_str(&format!(", p = {e:.4}"));
                }
                if let Some(m) = p.get("modulation").filter(|m| !m.is_null()) {
                    line.push_str(&format!(", m = {:.4}, Ω = {:.6e}", num(m, "depth"), num(m, "frequency")));
                }
                out.push(line);
            }
        }
        "tomo_sim" => {
            out.push(format!(
                "{} scheme, {} shots per setting, {} cells",
                s["scheme"].as_str().unwrap_or("?"),
                s["shots_per_setting"],
                s["cells"]
            ));
            out.push(format!("max |frequency − probability| = {:.3e}", num(s, "max_frequency_deviation")));
        }
        "tomo_fit" | "full_pipeline" => {
            for r in s["reconstructions"].as_array().into_iter().flatten() {
                out.push(format!(
                    "{}: min eigenvalue {:.3e}, log-likelihood {:.6}, {} iterations",
                    r["method"].as_str().unwrap_or("?"),
                    num(r, "min_eigenvalue"),
                    num(r, "log_likelihood"),
                    r["iterations"]
                ));
            }
            entanglement_lines(s, &mut out);
        }
        "bell" => {
            out.push(chsh_line("S", num(s, "chsh")));
            out.push(chsh_line("S (optimized)", num(s, "chsh_optimized")));
            out.push(format!("concurrence = {:.6}", num(s, "concurrence")));
            out.push(witness_line(num(s, "witness")));
        }
        other => out.push(format!("unknown scenario {other}")),
    }
    out
}

/// Summarizes a run directory. Classifications use `sigma` standard errors.
pub fn report(dir: &Path, sigma: f64) -> Result<Report> {
    let manifest = read_manifest(dir)?;
    if let Some(failure) = &manifest.failure {
        return Ok(Report {
            scenario: manifest.scenario,
            status: manifest.status,
            lines: vec![format!("run failed: kind={} code={} reason=\"{}\"", failure.kind, failure.code, failure.reason)],
            summary: Value::Null,
        });
    }
    for a in &manifest.artifacts {
        if !dir.join(&a.path).is_file() {
            return Err(HarnessError::MissingArtifact(dir.join(&a.path).display().to_string()));
        }
    }
    let path = dir.join(SUMMARY);
    let bytes = fs::read(&path).map_err(|_| HarnessError::MissingArtifact(path.display().to_string()))?;
    let summary: Value =
        serde_json::from_slice(&bytes).map_err(|e| HarnessError::Parse(format!("{}: {e}", path.display())))?;
    let kind = summary["scenario"].as_str().unwrap_or("?").to_owned();
    let mut lines = vec![format!("scenario {kind} (seed {})", summary["seed"])];
    lines.extend(scenario_lines(&kind, &summary, sigma));
    Ok(Report { scenario: Some(kind), status: manifest.status, lines, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_drops_trailing_zero() {
        assert_eq!(rounded(2.03), "2");
        assert_eq!(rounded(-0.04), "0");
        assert_eq!(rounded(0.96), "1");
        assert_eq!(rounded(0.07), "0.1");
    }

    #[test]
    fn chsh_verdicts() {
        assert_eq!(chsh_line("S", 2.0 * 2f64.sqrt()), "S = 2.828427 (> 2: local realism violated)");
        assert!(chsh_line("S", 1.9).contains("no violation"));
    }
}
