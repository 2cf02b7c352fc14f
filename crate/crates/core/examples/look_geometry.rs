//! Solar/view geometry and access decisions for the three pointing modes as
//! a satellite flies past a target offset from its track.
//!
//! cargo run --example look_geometry

use xcal::astro::{Epoch, GeodeticPoint};
use xcal::propagator::{ForceModel, OrbitalElements, Propagator};
use xcal::sensing::{
    in_access, look_geometry, nadir_point, swath_half_width, PointingMode, SensorSpec,
};

fn main() -> xcal::Result<()> {
    let epoch = Epoch::parse_iso("2020-06-01T00:00:00Z")?;
    let el = OrbitalElements::circular(500.0, 97.4, 30.0, 0.0, epoch);
    let prop = Propagator::new(el, ForceModel::J2Secular)?;

    // Target 2 deg east of where the track crosses 20 N.
    let mut t = 0.0;
    while nadir_point(&prop.state_at(t)?).latitude_deg < 20.0 {
        t += 1.0;
    }
    let crossing = nadir_point(&prop.state_at(t)?);
    let target = GeodeticPoint::surface(20.0, crossing.longitude_deg + 2.0);
    println!(
        "cross-track reach at 27.5 deg: {:.0} km",
        swath_half_width(500.0, 27.5)?
    );

    let sensors: Vec<(PointingMode, SensorSpec)> = PointingMode::ALL
        .into_iter()
        .map(|m| match m {
            PointingMode::NadirFixed => (m, SensorSpec::nadir(2.0, 3.0)),
            _ => (m, SensorSpec::agile(2.0, 3.0, m, 27.5)),
        })
        .collect();
    println!(
        "{:>6} {:>9} {:>7} {:>7} {:>8} {:>8}  access",
        "dt_s", "off_nadir", "vza", "sza", "roll", "pitch"
    );
    for dt in (-24..=24).step_by(3) {
        let s = prop.state_at(t + dt as f64)?;
        let Some(look) = look_geometry(&s, &target) else {
            continue;
        };
        let modes: Vec<&str> = sensors
            .iter()
            .filter(|(_, s)| in_access(&look, s))
            .map(|(m, _)| m.as_str())
            .collect();
        println!(
            "{dt:>6} {:>9.2} {:>7.2} {:>7.2} {:>8.2} {:>8.2}  {}",
            look.off_nadir_deg,
            look.vza_deg,
            look.sza_deg,
            look.roll_deg,
            look.pitch_deg,
            modes.join(" ")
        );
    }
    Ok(())
}
