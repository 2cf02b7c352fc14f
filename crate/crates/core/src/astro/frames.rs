use serde::{Deserialize, Serialize};

use super::time::{gmst_deg, Epoch};
use crate::constants::EARTH_RADIUS_KM;
use crate::error::{Error, Result};
use crate::Vec3;

/// Inertial position/velocity of a satellite (km, km/s, mean equator & equinox).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EciState {
    pub position: Vec3,
    pub velocity: Vec3,
    pub epoch: Epoch,
}

/// Point on or above the spherical Earth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodeticPoint {
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    #[serde(default)]
    pub altitude_km: f64,
}

/// Wraps a longitude into (-180, 180].
pub fn normalize_longitude(lon_deg: f64) -> f64 {
    let wrapped = (lon_deg + 180.0).rem_euclid(360.0) - 180.0;
    if wrapped == -180.0 {
        180.0
    } else {
        wrapped
    }
}

impl GeodeticPoint {
    pub fn new(latitude_deg: f64, longitude_deg: f64, altitude_km: f64) -> Self {
        GeodeticPoint {
            latitude_deg: latitude_deg.clamp(-90.0, 90.0),
            longitude_deg: normalize_longitude(longitude_deg),
            altitude_km,
        }
    }

    pub fn surface(latitude_deg: f64, longitude_deg: f64) -> Self {
        GeodeticPoint::new(latitude_deg, longitude_deg, 0.0)
    }

    /// Unit vector from the geocenter, Earth-fixed frame.
    pub fn unit_ecef(&self) -> Vec3 {
        let (lat, lon) = (
            self.latitude_deg.to_radians(),
            self.longitude_deg.to_radians(),
        );
        Vec3::new(lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin())
    }
}

fn rotate_z(v: &Vec3, angle_rad: f64) -> Vec3 {
    let (s, c) = angle_rad.sin_cos();
    Vec3::new(c * v.x - s * v.y, s * v.x + c * v.y, v.z)
}

/// Rotates an inertial vector into the Earth-fixed frame at `epoch`.
pub fn eci_to_ecef(v: &Vec3, epoch: Epoch) -> Vec3 {
    rotate_z(v, -gmst_deg(epoch).to_radians())
}

pub fn ecef_to_eci(v: &Vec3, epoch: Epoch) -> Vec3 {
    rotate_z(v, gmst_deg(epoch).to_radians())
}

pub fn ecef_to_geodetic(pos: &Vec3) -> Result<GeodeticPoint> {
    let r = pos.norm();
    if r == 0.0 || !r.is_finite() {
        return Err(Error::ZeroVector);
    }
    let lat = (pos.z / r).clamp(-1.0, 1.0).asin().to_degrees();
    let lon = pos.y.atan2(pos.x).to_degrees();
    Ok(GeodeticPoint::new(lat, lon, r - EARTH_RADIUS_KM))
}

pub fn geodetic_to_ecef(point: &GeodeticPoint) -> Vec3 {
    point.unit_ecef() * (EARTH_RADIUS_KM + point.altitude_km)
}

/// Great-circle angle between two surface points, degrees.
pub fn central_angle_deg(a: &GeodeticPoint, b: &GeodeticPoint) -> f64 {
    let (ua, ub) = (a.unit_ecef(), b.unit_ecef());
    // atan2 form keeps precision for tiny separations
    ua.cross(&ub).norm().atan2(ua.dot(&ub)).to_degrees()
}
