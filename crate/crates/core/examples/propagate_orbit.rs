//! Propagates a sun-synchronous orbit for one day and prints the J2 node
//! drift alongside the sub-satellite track.
//!
//! cargo run --example propagate_orbit [-- altitude_km]

use xcal::astro::Epoch;
use xcal::propagator::{
    j2_secular_rates, sso_inclination, ForceModel, OrbitalElements, Propagator,
};
use xcal::sensing::nadir_point;

fn main() -> xcal::Result<()> {
    let altitude: f64 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(705.0);
    let epoch = Epoch::parse_iso("2020-03-20T00:00:00Z")?;
    let inclination = sso_inclination(altitude)?;
    let el = OrbitalElements::circular(altitude, inclination, 0.0, 0.0, epoch);
    let rates = j2_secular_rates(&el);
    println!(
        "alt {altitude} km  incl {inclination:.3} deg  period {:.1} min  node drift {:.4} deg/day",
        el.period_s() / 60.0,
        rates.raan_rate
    );

    let j2 = Propagator::new(el, ForceModel::J2Secular)?;
    let kepler = Propagator::new(el, ForceModel::TwoBody)?;
    for hour in (0..=24).step_by(3) {
        let t = hour as f64 * 3600.0;
        let s = j2.state_at(t)?;
        let p = nadir_point(&s);
        let drift_km = (s.position - kepler.state_at(t)?.position).norm();
        println!(
            "t+{hour:>2} h  raan {:8.4}  lat {:7.2}  lon {:8.2}  |r| {:8.2} km  J2 vs two-body {:7.1} km",
            j2.raan_at(t),
            p.latitude_deg,
            p.longitude_deg,
            s.position.norm(),
            drift_km
        );
    }
    Ok(())
}
