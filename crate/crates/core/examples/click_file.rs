//! Writes a simulated run as a clickstream v1 file and reads it back.
//!
//! ```bash
//! cargo run --example click_file
//! ```

use islands::harness::{ingest, ingest_summary};
use islands::photon::{coincidences, simulate_clicks, write_clickstream, DetectorModel, SourceModel};
use islands::tomography::singlet_witness;
use islands::quantum::{CMatrix, DensityMatrix};
use islands::quantum::linalg::real;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let singlet = DensityMatrix::new(CMatrix::identity(4, 4) * real(0.5) - singlet_witness(), vec![2, 2])?;
    let detector = DetectorModel { efficiency: 0.7, dark_rate: 200.0, dead_time: 2e-8 };
    let stream = simulate_clicks(&SourceModel::pair_source(5e3, singlet), [detector; 2], 2.0, 42)?;

    let path = std::env::temp_dir().join("islands_example.clicks");
    std::fs::write(&path, write_clickstream(&stream))?;
    let back = ingest(&path)?;
    assert_eq!(back.events, stream.events);
    println!("wrote and re-read {}", path.display());
    for line in ingest_summary(&back).lines() {
        println!("  {line}");
    }

    for window in [2e-9, 1e-8, 1e-7] {
        let c = coincidences(&back, window);
        println!(
            "window {window:.0e} s: raw {}, accidental {:.2}, corrected {:.1} ± {:.1}",
            c.raw, c.accidental, c.corrected, c.std_err
        );
    }
    Ok(())
}
