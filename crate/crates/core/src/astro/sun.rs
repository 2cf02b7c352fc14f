use super::time::Epoch;
use crate::constants::AU_KM;
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SunPosition {
    /// Unit vector from the geocenter toward the Sun, inertial frame.
    pub direction: Vec3,
    pub distance_km: f64,
}

impl SunPosition {
    pub fn declination_deg(&self) -> f64 {
        self.direction.z.clamp(-1.0, 1.0).asin().to_degrees()
    }

    pub fn right_ascension_deg(&self) -> f64 {
        self.direction
            .y
            .atan2(self.direction.x)
            .to_degrees()
            .rem_euclid(360.0)
    }

    pub fn distance_au(&self) -> f64 {
        self.distance_km / AU_KM
    }
}

/// Mean longitude of the Sun, degrees in [0, 360). Defines mean solar time.
pub fn sun_mean_longitude_deg(epoch: Epoch) -> f64 {
    (280.460 + 0.985_647_4 * epoch.days_since_j2000()).rem_euclid(360.0)
}

/// Low-precision solar ephemeris (Astronomical Almanac mean-element series,
/// about 0.01 deg over 1950-2050).
pub fn sun_position_eci(epoch: Epoch) -> SunPosition {
    let n = epoch.days_since_j2000();
    let mean_lon = sun_mean_longitude_deg(epoch);
    let mean_anom = (357.528 + 0.985_600_3 * n).rem_euclid(360.0).to_radians();
    let ecl_lon =
        (mean_lon + 1.915 * mean_anom.sin() + 0.020 * (2.0 * mean_anom).sin()).to_radians();
    let obliquity = (23.439 - 0.000_000_4 * n).to_radians();
    let r_au = 1.000_14 - 0.016_71 * mean_anom.cos() - 0.000_14 * (2.0 * mean_anom).cos();

    let direction = Vec3::new(
        ecl_lon.cos(),
        obliquity.cos() * ecl_lon.sin(),
        obliquity.sin() * ecl_lon.sin(),
    );
    SunPosition {
        direction,
        distance_km: r_au * AU_KM,
    }
}
