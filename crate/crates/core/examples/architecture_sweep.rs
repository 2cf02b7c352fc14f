//! Compares transfer-radiometer constellation architectures by the number of
//! cross-calibration opportunities they give the test satellites.
//!
//! cargo run --release --example architecture_sweep [-- config.toml]

use xcal::scenario::{evaluate_architectures, ScenarioConfig, ARCHITECTURES};

fn main() -> xcal::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/arch_sweep.toml").into());
    let cfg = ScenarioConfig::load(&path)?;
    let runs = evaluate_architectures(&cfg)?;

    for ((arch_id, results), (_, n_sats, n_planes)) in runs.iter().zip(ARCHITECTURES) {
        println!("architecture {arch_id}: {n_sats} satellites in {n_planes} planes");
        for (label, regions) in &results.vicarious {
            println!("  vicarious {label:<24} {:>5} regions", regions.len());
        }
        for (label, opps) in &results.toa {
            println!("  toa       {label:<24} {:>5} crossovers", opps.len());
        }
    }
    Ok(())
}
