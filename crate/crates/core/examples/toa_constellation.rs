//! Top-of-atmosphere crossovers between a transfer-radiometer constellation
//! and Dove test satellites.
//!
//! cargo run --release --example toa_constellation [-- config.toml]

use xcal::scenario::{run_config, ScenarioConfig};

fn main() -> xcal::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/toa_arch4.toml").into());
    let cfg = ScenarioConfig::load(&path)?;
    let results = run_config(&cfg)?;

    for (label, opps) in &results.toa {
        println!("criteria {label}");
        for test in &results.test_ids {
            let mine: Vec<_> = opps
                .iter()
                .filter(|o| &*o.test_event.sat_id == test)
                .collect();
            println!("  {test:>12}: {} crossovers", mine.len());
            for o in mine.iter().take(5) {
                let loc = o.location();
                println!(
                    "    {} x {} at ({:7.2}, {:8.2})  dt {:+.2} h  dSZA {:.1}  dVZA {:.1}",
                    o.ref_event.sat_id,
                    o.ref_event.epoch,
                    loc.latitude_deg,
                    loc.longitude_deg,
                    o.dt_hours,
                    o.dsza_deg,
                    o.dvza_deg
                );
            }
        }
    }
    Ok(())
}
