//! Model selection for delayed-luminescence decay curves.
//!
//! ```bash
//! cargo run --example decay_fit
//! ```

use islands::photon::{fit_decay, synthetic_decay, DecayFitOptions, DecayParams, DecayVerdict, Modulation};

fn show(title: &str, truth: DecayParams, options: &DecayFitOptions, seed: u64) -> Result<(), Box<dyn std::error::Error>> {
    let times: Vec<f64> = (0..200).map(|k| k as f64 * 0.1).collect();
    let series = synthetic_decay(&truth, &times, seed);
    let report = fit_decay(&series, options)?;
    println!("{title}");
    for fit in &report.fits {
        match &fit.params {
            Some(p) => println!(
                "  {:<22} AIC {:>10.2}  I0 {:>8.1}  τ {:>7.3}  p {:>6}",
                fit.model.name(),
                fit.aic,
                p.amplitude,
                p.tau,
                p.exponent.map_or("-".into(), |e| format!("{e:.3}"))
            ),
            None => println!("  {:<22} failed: {}", fit.model.name(), fit.failure.as_deref().unwrap_or("?")),
        }
    }
    match report.verdict {
        DecayVerdict::Selected(model) => println!("  -> {}\n", model.name()),
        DecayVerdict::Indeterminate => println!("  -> indeterminate\n"),
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let plain = DecayFitOptions::default();
    show("exponential, τ = 3", DecayParams::exponential(2000.0, 3.0), &plain, 1)?;
    show("hyperbolic, τ = 1.5, p = 2", DecayParams::hyperbolic(2000.0, 1.5, 2.0), &plain, 2)?;
    let wobble = Modulation { depth: 0.3, frequency: 2.0, phase: 0.0 };
    let with_modulation = DecayFitOptions { modulation: true, ..DecayFitOptions::default() };
    show(
        "modulated exponential, m = 0.3, Ω = 2",
        DecayParams::exponential(2000.0, 3.0).modulated(wobble),
        &with_modulation,
        3,
    )?;
    Ok(())
}
