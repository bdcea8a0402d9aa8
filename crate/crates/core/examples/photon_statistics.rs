//! Coherent, thermal and single-emitter light through a two-detector
//! Hanbury Brown–Twiss setup: g2(0), Mandel Q and waiting-time tests.
//!
//! ```bash
//! cargo run --example photon_statistics
//! ```

use islands::photon::{counting_stats, g2, simulate_clicks, waiting_times, DetectorModel, LagGrid, SourceModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let detector = DetectorModel { efficiency: 0.9, dark_rate: 20.0, dead_time: 0.0 };
    let sources = [
        (SourceModel::single_emitter(1e4, 5e-5), LagGrid::new(4e-4, 2e-6)),
        (SourceModel::coherent(1e4), LagGrid::new(1e-2, 1e-4)),
        (SourceModel::thermal(1e4, 1e-3), LagGrid::new(1e-2, 1e-4)),
    ];
    println!(
        "{:<15} {:>8} {:>16} {:>18} {:>10}",
        "source", "events", "g2(0)", "Mandel Q", "KS p"
    );
    for (seed, (source, grid)) in sources.iter().enumerate() {
        let stream = simulate_clicks(source, [detector; 2], 10.0, 100 + seed as u64)?;
        let curve = g2(&stream, grid)?;
        let (g0, se) = curve.at_zero();
        let q = counting_stats(&stream, 1e-3)?;
        let wait = waiting_times(&stream, 0)?;
        println!(
            "{:<15} {:>8} {:>8.3} ± {:<5.3} {:>9.4} ± {:<6.4} {:>10.2e}  {}",
            source.name(),
            stream.len(),
            g0,
            se,
            q.mandel_q,
            q.q_std_err,
            wait.ks_p_value,
            curve.classify(4.0).label()
        );
    }
    Ok(())
}
