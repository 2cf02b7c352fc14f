//! Time scales, Earth-fixed/inertial frames, and the solar ephemeris.
//!
//! Everything here uses a single continuous UT-like time scale (leap seconds
//! ignored) and a spherical Earth of radius [`EARTH_RADIUS_KM`].
//!
//! [`EARTH_RADIUS_KM`]: crate::constants::EARTH_RADIUS_KM

mod frames;
mod sun;
mod time;

pub use frames::{
    central_angle_deg, ecef_to_eci, ecef_to_geodetic, eci_to_ecef, geodetic_to_ecef,
    normalize_longitude, EciState, GeodeticPoint,
};
pub use sun::{sun_mean_longitude_deg, sun_position_eci, SunPosition};
pub use time::{calendar_from_jd, gmst_deg, jd_from_calendar, CalendarDateTime, Epoch};
