//! Flagship fleet against three Dove test satellites over the bundled
//! calibration sites: region opportunities and their time-gap distribution.
//!
//! cargo run --release --example vicarious_flagships [-- config.toml]

use std::time::Instant;

use xcal::scenario::{run_config, ScenarioConfig};

fn main() -> xcal::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/configs/vicarious_flagships.toml"
        )
        .into()
    });
    let cfg = ScenarioConfig::load(&path)?;
    let started = Instant::now();
    let results = run_config(&cfg)?;
    println!("ran {} in {:.1} s", path, started.elapsed().as_secs_f64());

    let (label, regions) = &results.vicarious[results.loosest];
    println!("criteria {label}: {} region opportunities", regions.len());
    for test in &results.test_ids {
        let mine: Vec<_> = regions.iter().filter(|r| &*r.test_sat == test).collect();
        let mut hist = [0usize; 49];
        for r in &mine {
            hist[(r.dt_hours.abs() as usize).min(48)] += 1;
        }
        let buckets: Vec<String> = hist
            .iter()
            .enumerate()
            .filter(|(_, n)| **n > 0)
            .map(|(h, n)| format!("{h}h:{n}"))
            .collect();
        println!(
            "{test:>12} {:>4}  |dt| histogram {}",
            mine.len(),
            buckets.join(" ")
        );
    }
    Ok(())
}
