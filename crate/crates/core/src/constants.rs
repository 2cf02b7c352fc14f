//! Physical constants shared by every geometric computation.

/// Earth gravitational parameter, km^3/s^2.
pub const MU_EARTH: f64 = 398_600.441_8;

/// Equatorial radius, km. Also the radius of the spherical Earth model.
pub const EARTH_RADIUS_KM: f64 = 6378.137;

/// Second zonal harmonic.
pub const J2: f64 = 1.08263e-3;

pub const SECONDS_PER_DAY: f64 = 86_400.0;

/// Julian Date of the J2000.0 epoch (2000-01-01T12:00:00).
pub const JD_J2000: f64 = 2_451_545.0;

/// Nodal precession rate of a sun-synchronous orbit, deg/day.
pub const SSO_RAAN_RATE_DEG_PER_DAY: f64 = 0.98565;

/// Astronomical unit, km.
pub const AU_KM: f64 = 149_597_870.7;

/// Earth rotation rate, rad/s.
pub const EARTH_ROTATION_RAD_S: f64 = 7.292_115_146_706_979e-5;
