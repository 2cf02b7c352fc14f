//! Grids a few catalog sites and sweeps one agile satellite over them,
//! printing access intervals.
//!
//! cargo run --release --example site_access [-- sites.csv]

use xcal::access::{accesses_to_intervals, compute_accesses, Satellite, ScenarioWindow};
use xcal::astro::Epoch;
use xcal::catalog::{builtin_sites, grid_region, load_sites};
use xcal::propagator::{sso_inclination, OrbitalElements};
use xcal::sensing::{PointingMode, SensorSpec};

fn main() -> xcal::Result<()> {
    let sites = match std::env::args().nth(1) {
        Some(path) => load_sites(path)?,
        None => builtin_sites().into_iter().take(8).collect(),
    };
    for s in &sites {
        let grid = grid_region(s)?;
        println!(
            "{:<10} {:<28} ({:7.3}, {:8.3})  {} grid points",
            s.site_id,
            s.name,
            s.center.latitude_deg,
            s.center.longitude_deg,
            grid.len()
        );
    }

    let epoch = Epoch::parse_iso("2020-03-20T00:00:00Z")?;
    let el = OrbitalElements::circular(500.0, sso_inclination(500.0)?, 10.0, 0.0, epoch);
    let sensor = SensorSpec::agile(2.0, 3.0, PointingMode::CrossTrackAgile, 27.5);
    let sat = Satellite::new("AGILE-1", el, sensor);
    let window = ScenarioWindow::new(epoch, 48.0);

    let events = compute_accesses(&[sat], &sites, &window)?;
    let intervals = accesses_to_intervals(&events, window.fine_step_s);
    println!(
        "\n{} access events in {} intervals",
        events.len(),
        intervals.len()
    );
    for iv in intervals
        .iter()
        .filter(|iv| iv.target.grid_index() == Some(0))
    {
        println!(
            "  {:<12} {} +{:5.0} s  best off-nadir {:5.2}  vza {:5.2}  sza {:5.2}",
            iv.target.to_string(),
            iv.best.epoch.to_iso(),
            iv.end_s - iv.start_s,
            iv.best.off_nadir_deg,
            iv.best.vza_deg,
            iv.best.sza_deg
        );
    }
    Ok(())
}
