//! Runs a scenario file through the harness and prints its report.
//!
//! ```bash
//! cargo run --example run_scenario -- crates/core/examples/configs/g2_thermal.toml
//! ```

use std::path::PathBuf;

use islands::harness::{report, run, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/full_pipeline.toml")
    });
    let stem = config.file_stem().unwrap_or_default().to_string_lossy().into_owned();
    let out = std::env::temp_dir().join("islands_runs").join(stem);
    let outcome = run(&config, &RunOptions { out: Some(out), force: true }).map_err(|e| e.one_line())?;
    println!("run directory {}", outcome.dir.display());
    for a in &outcome.manifest.artifacts {
        println!("  {:<20} {:>9} bytes  sha256 {}", a.path, a.bytes, &a.sha256[..16]);
    }
    println!();
    print!("{}", report(&outcome.dir, 3.0)?.text());
    Ok(())
}
