//! Julian dates, sidereal time, and the Sun's position over a year.
//!
//! cargo run --example solar_geometry

use xcal::astro::{gmst_deg, sun_position_eci, Epoch};

fn main() -> xcal::Result<()> {
    let start = Epoch::from_calendar(2020, 1, 1, 12, 0, 0.0)?;
    println!(
        "{:<22} {:>14} {:>10} {:>9} {:>9} {:>8}",
        "epoch", "JD", "GMST", "RA", "dec", "AU"
    );
    for month in 0..12 {
        let epoch = start.plus_seconds(month as f64 * 30.4375 * 86_400.0);
        let sun = sun_position_eci(epoch);
        println!(
            "{:<22} {:>14.5} {:>10.4} {:>9.3} {:>9.3} {:>8.5}",
            epoch.to_iso(),
            epoch.julian_day,
            gmst_deg(epoch),
            sun.right_ascension_deg(),
            sun.declination_deg(),
            sun.distance_au()
        );
    }
    Ok(())
}
