//! Instrument pointing modes, access tests, and per-sample solar/view geometry.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::astro::{
    ecef_to_eci, ecef_to_geodetic, eci_to_ecef, sun_position_eci, EciState, GeodeticPoint,
};
use crate::constants::EARTH_RADIUS_KM;
use crate::error::{Error, Result};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PointingMode {
    /// Pushbroom or framing sensor with a fixed (possibly tilted) boresight.
    NadirFixed,
    /// Roll about the velocity axis only.
    CrossTrackAgile,
    /// Boresight anywhere inside a cone about nadir.
    #[serde(rename = "CONICAL_3DOF")]
    Conical3Dof,
}

impl PointingMode {
    pub const ALL: [PointingMode; 3] = [
        PointingMode::NadirFixed,
        PointingMode::CrossTrackAgile,
        PointingMode::Conical3Dof,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PointingMode::NadirFixed => "NADIR_FIXED",
            PointingMode::CrossTrackAgile => "CROSS_TRACK_AGILE",
            PointingMode::Conical3Dof => "CONICAL_3DOF",
        }
    }
}

impl fmt::Display for PointingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PointingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PointingMode::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidSensor(format!("unknown pointing mode `{s}`")))
    }
}

/// Field of view, field of regard, and pointing mode of one instrument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorSpec {
    /// Full angle, degrees.
    pub fov_cross_track_deg: f64,
    /// Full angle, degrees.
    pub fov_along_track_deg: f64,
    pub pointing_mode: PointingMode,
    /// Maximum off-nadir boresight angle for the agile modes, degrees.
    #[serde(default)]
    pub for_half_angle_deg: f64,
    /// Static roll of the boresight, positive toward the right of the ground track.
    #[serde(default, alias = "boresight_tilt_deg")]
    pub boresight_tilt_cross_track_deg: f64,
}

impl SensorSpec {
    pub fn nadir(fov_cross_track_deg: f64, fov_along_track_deg: f64) -> Self {
        SensorSpec {
            fov_cross_track_deg,
            fov_along_track_deg,
            pointing_mode: PointingMode::NadirFixed,
            for_half_angle_deg: 0.0,
            boresight_tilt_cross_track_deg: 0.0,
        }
    }

    pub fn agile(
        fov_cross_track_deg: f64,
        fov_along_track_deg: f64,
        pointing_mode: PointingMode,
        for_half_angle_deg: f64,
    ) -> Self {
        SensorSpec {
            fov_cross_track_deg,
            fov_along_track_deg,
            pointing_mode,
            for_half_angle_deg,
            boresight_tilt_cross_track_deg: 0.0,
        }
    }

    pub fn with_tilt(mut self, tilt_deg: f64) -> Self {
        self.boresight_tilt_cross_track_deg = tilt_deg;
        self
    }

    pub fn with_mode(mut self, mode: PointingMode) -> Self {
        self.pointing_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fov_ok = |v: f64| v > 0.0 && v < 180.0;
        if !fov_ok(self.fov_cross_track_deg) || !fov_ok(self.fov_along_track_deg) {
            return Err(Error::InvalidSensor(format!(
                "FOV {} x {} deg must lie in (0, 180)",
                self.fov_cross_track_deg, self.fov_along_track_deg
            )));
        }
        if !(0.0..70.0).contains(&self.for_half_angle_deg) {
            return Err(Error::InvalidSensor(format!(
                "field-of-regard half-angle {} deg must lie in [0, 70)",
                self.for_half_angle_deg
            )));
        }
        if self.boresight_tilt_cross_track_deg.abs() + self.fov_cross_track_deg / 2.0 >= 90.0 {
            return Err(Error::InvalidSensor(
                "tilted footprint reaches the horizon".into(),
            ));
        }
        Ok(())
    }

    /// Largest off-nadir angle at which any target can be in access.
    pub fn max_off_nadir_deg(&self) -> f64 {
        let roll = (self.boresight_tilt_cross_track_deg.abs() + self.fov_cross_track_deg / 2.0)
            .to_radians();
        let pitch = (self.fov_along_track_deg / 2.0).to_radians();
        let footprint = (roll.cos() * pitch.cos()).acos().to_degrees();
        match self.pointing_mode {
            PointingMode::NadirFixed => footprint,
            _ => footprint.max(self.for_half_angle_deg),
        }
    }

    fn in_static_footprint(&self, look: &LookGeometry) -> bool {
        (look.roll_deg - self.boresight_tilt_cross_track_deg).abs()
            <= self.fov_cross_track_deg / 2.0
            && look.pitch_deg.abs() <= self.fov_along_track_deg / 2.0
    }
}

/// Solar and view geometry of one satellite/target pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LookGeometry {
    /// Angle at the satellite between nadir and the line of sight.
    pub off_nadir_deg: f64,
    /// View zenith angle at the target.
    pub vza_deg: f64,
    /// Solar zenith angle at the target.
    pub sza_deg: f64,
    pub slant_range_km: f64,
    /// Line-of-sight roll about the along-track axis, positive to the right of track.
    pub roll_deg: f64,
    /// Line-of-sight elevation out of the cross-track plane, positive forward.
    pub pitch_deg: f64,
}

fn angle_between_deg(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b)).to_degrees()
}

/// Look geometry from raw vectors, all expressed in one common frame.
///
/// `target` is the target position (km) and `sun_dir` a unit vector toward the
/// Sun. Returns `None` when the target is behind the Earth limb.
pub fn look_from_vectors(
    sat_pos: &Vec3,
    sat_vel: &Vec3,
    target: &Vec3,
    sun_dir: &Vec3,
) -> Option<LookGeometry> {
    let los = target - sat_pos;
    let slant = los.norm();
    let zenith = target.normalize();
    let to_sat = -los;
    if to_sat.dot(&zenith) <= 0.0 {
        return None;
    }
    let nadir = -sat_pos.normalize();
    let orbit_normal = sat_pos.cross(sat_vel).normalize();
    let right = -orbit_normal;
    let forward = right.cross(&nadir);
    let d = los / slant;
    let (dx, dy, dz) = (d.dot(&forward), d.dot(&right), d.dot(&nadir));

    Some(LookGeometry {
        off_nadir_deg: angle_between_deg(&nadir, &los),
        vza_deg: angle_between_deg(&zenith, &to_sat),
        sza_deg: angle_between_deg(&zenith, sun_dir),
        slant_range_km: slant,
        roll_deg: dy.atan2(dz).to_degrees(),
        pitch_deg: dx.clamp(-1.0, 1.0).asin().to_degrees(),
    })
}

/// Sub-satellite point on the spherical Earth (altitude 0).
pub fn nadir_point(state: &EciState) -> GeodeticPoint {
    let ecef = eci_to_ecef(&state.position, state.epoch);
    let mut p = ecef_to_geodetic(&ecef).expect("propagated position is non-zero");
    p.altitude_km = 0.0;
    p
}

/// Solar/view geometry of a surface target seen from `sat` at the state epoch.
pub fn look_geometry(sat: &EciState, target: &GeodeticPoint) -> Option<LookGeometry> {
    let target_eci = ecef_to_eci(&(target.unit_ecef() * EARTH_RADIUS_KM), sat.epoch);
    let sun = sun_position_eci(sat.epoch);
    look_from_vectors(&sat.position, &sat.velocity, &target_eci, &sun.direction)
}

/// Whether `sensor` can image the target described by `look`.
///
/// Agile modes may always fall back to their static footprint; beyond that,
/// the cross-track mode reaches targets inside the FOR cone whose along-track
/// miss fits in half the along-track FOV, and the conical mode reaches any
/// target inside the FOR cone.
pub fn in_access(look: &LookGeometry, sensor: &SensorSpec) -> bool {
    if sensor.in_static_footprint(look) {
        return true;
    }
    let in_cone = look.off_nadir_deg <= sensor.for_half_angle_deg;
    match sensor.pointing_mode {
        PointingMode::NadirFixed => false,
        PointingMode::CrossTrackAgile => {
            in_cone && look.pitch_deg.abs() <= sensor.fov_along_track_deg / 2.0
        }
        PointingMode::Conical3Dof => in_cone,
    }
}

/// Earth-central angle (deg) between nadir and the point seen at `off_nadir_deg`.
pub fn earth_central_angle_deg(altitude_km: f64, off_nadir_deg: f64) -> Result<f64> {
    let eta = off_nadir_deg.to_radians();
    let sin_vza = (EARTH_RADIUS_KM + altitude_km) / EARTH_RADIUS_KM * eta.sin();
    if !(0.0..90.0).contains(&off_nadir_deg) || sin_vza >= 1.0 {
        return Err(Error::BeyondLimb {
            altitude_km,
            half_angle_deg: off_nadir_deg,
        });
    }
    Ok((sin_vza.asin() - eta).to_degrees())
}

/// Ground arc from nadir to the edge of a cone of `half_angle_deg`, km.
pub fn swath_half_width(altitude_km: f64, half_angle_deg: f64) -> Result<f64> {
    Ok(earth_central_angle_deg(altitude_km, half_angle_deg)?.to_radians() * EARTH_RADIUS_KM)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::astro::{gmst_deg, Epoch};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dove(mode: PointingMode) -> SensorSpec {
        SensorSpec::agile(2.0, 3.0, mode, 27.5)
    }

    // Satellite over (0, 0) at an epoch where GMST is zero, moving north.
    fn overhead_state(alt: f64) -> EciState {
        let e = Epoch::J2000;
        let e = e.plus_seconds(-gmst_deg(e) / 360.985_647_366_29 * 86_400.0);
        let r = EARTH_RADIUS_KM + alt;
        EciState {
            position: Vec3::new(r, 0.0, 0.0),
            velocity: Vec3::new(0.0, 0.0, 7.5),
            epoch: e,
        }
    }

    #[test]
    fn nadir_point_basics() {
        let s = overhead_state(450.0);
        let p = nadir_point(&s);
        assert!(p.latitude_deg.abs() < 1e-6 && p.longitude_deg.abs() < 1e-6);
        assert_eq!(p.altitude_km, 0.0);

        let pole = EciState {
            position: Vec3::new(0.0, 0.0, 7000.0),
            velocity: Vec3::new(7.5, 0.0, 0.0),
            epoch: s.epoch,
        };
        assert!((nadir_point(&pole).latitude_deg - 90.0).abs() < 1e-9);
    }

    #[test]
    fn target_at_nadir() {
        let s = overhead_state(450.0);
        let look = look_geometry(&s, &GeodeticPoint::surface(0.0, 0.0)).unwrap();
        assert!(look.off_nadir_deg < 1e-6 && look.vza_deg < 1e-6);
        assert!((look.slant_range_km - 450.0).abs() < 1e-6);
        for mode in PointingMode::ALL {
            assert!(in_access(&look, &dove(mode)));
        }
    }

    #[test]
    fn sun_at_zenith_gives_zero_sza() {
        let target = Vec3::new(0.0, EARTH_RADIUS_KM, 0.0);
        let sat = Vec3::new(0.0, EARTH_RADIUS_KM + 500.0, 100.0);
        let look = look_from_vectors(
            &sat,
            &Vec3::new(7.0, 0.0, 0.0),
            &target,
            &Vec3::new(0.0, 1.0, 0.0),
        )
        .unwrap();
        assert!(look.sza_deg.abs() < 1e-12);
    }

    #[test]
    fn vza_follows_law_of_sines() {
        let h = 710.0;
        let eta = 7.5f64;
        let expected = ((EARTH_RADIUS_KM + h) / EARTH_RADIUS_KM * eta.to_radians().sin())
            .asin()
            .to_degrees();
        assert!((expected - 8.34).abs() < 0.02);
        // place the target at the central angle for that off-nadir angle
        let lambda = earth_central_angle_deg(h, eta).unwrap().to_radians();
        let sat = Vec3::new(EARTH_RADIUS_KM + h, 0.0, 0.0);
        let target = Vec3::new(lambda.cos(), lambda.sin(), 0.0) * EARTH_RADIUS_KM;
        let look = look_from_vectors(&sat, &Vec3::new(0.0, 0.0, 7.5), &target, &Vec3::x()).unwrap();
        assert!((look.off_nadir_deg - eta).abs() < 1e-9);
        assert!((look.vza_deg - expected).abs() < 1e-9);
        // eastward target from a northbound satellite is to the right
        assert!((look.roll_deg - eta).abs() < 1e-9 && look.pitch_deg.abs() < 1e-9);
    }

    #[test]
    fn limb_occlusion() {
        let sat = Vec3::new(EARTH_RADIUS_KM + 500.0, 0.0, 0.0);
        let behind = Vec3::new(-EARTH_RADIUS_KM, 0.0, 0.0);
        assert!(look_from_vectors(&sat, &Vec3::z(), &behind, &Vec3::x()).is_none());
    }

    #[test]
    fn conical_threshold() {
        let look = LookGeometry {
            off_nadir_deg: 30.0,
            vza_deg: 33.0,
            sza_deg: 20.0,
            slant_range_km: 600.0,
            roll_deg: 30.0,
            pitch_deg: 0.0,
        };
        assert!(!in_access(&look, &dove(PointingMode::Conical3Dof)));
        let closer = LookGeometry {
            off_nadir_deg: 27.0,
            roll_deg: 0.0,
            pitch_deg: 27.0,
            ..look
        };
        assert!(in_access(&closer, &dove(PointingMode::Conical3Dof)));
        assert!(!in_access(&closer, &dove(PointingMode::CrossTrackAgile)));
    }

    #[test]
    fn tilted_footprint() {
        let olci = SensorSpec::nadir(68.6, 1.0).with_tilt(12.6);
        let at = |roll: f64| LookGeometry {
            off_nadir_deg: roll.abs(),
            vza_deg: 0.0,
            sza_deg: 0.0,
            slant_range_km: 0.0,
            roll_deg: roll,
            pitch_deg: 0.0,
        };
        assert!(in_access(&at(46.0), &olci));
        assert!(!in_access(&at(-22.5), &olci));
        assert!(in_access(&at(-21.0), &olci));
        assert!((olci.max_off_nadir_deg() - 46.9).abs() < 0.01);
    }

    #[test]
    fn swath_widths() {
        assert_eq!(swath_half_width(500.0, 0.0).unwrap(), 0.0);
        let landsat = swath_half_width(710.0, 7.5).unwrap();
        assert!((2.0 * landsat - 187.0).abs() < 1.0, "{landsat}");
        // Law of cosines: slant range s solves s^2 - 2 r s cos(eta) + r^2 - Re^2 = 0.
        let (re, r, eta) = (
            EARTH_RADIUS_KM,
            EARTH_RADIUS_KM + 450.0,
            27.5f64.to_radians(),
        );
        let s = r * eta.cos() - (re * re - r * r * eta.sin().powi(2)).sqrt();
        let lambda = ((r * r + re * re - s * s) / (2.0 * r * re)).acos();
        let dove = swath_half_width(450.0, 27.5).unwrap();
        assert!((dove - lambda * re).abs() < 1e-6, "{dove}");
        assert!((dove - 236.6).abs() < 0.5);
        assert!(matches!(
            swath_half_width(450.0, 80.0),
            Err(Error::BeyondLimb { .. })
        ));
    }

    #[test]
    fn sensor_validation() {
        assert!(dove(PointingMode::Conical3Dof).validate().is_ok());
        assert!(SensorSpec::nadir(0.0, 1.0).validate().is_err());
        assert!(SensorSpec::agile(2.0, 3.0, PointingMode::Conical3Dof, 70.0)
            .validate()
            .is_err());
        assert_eq!(
            "conical_3dof".parse::<PointingMode>().unwrap(),
            PointingMode::Conical3Dof
        );
        assert!("sideways".parse::<PointingMode>().is_err());
    }

    fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
        loop {
            let v = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let n = v.norm();
            if n > 0.1 && n <= 1.0 {
                return v / n;
            }
        }
    }

    // Random satellite/target geometries with the target within ~1500 km of nadir.
    fn random_look(rng: &mut ChaCha8Rng) -> (Vec3, Vec3, Vec3, Vec3) {
        let up = random_unit(rng);
        let sat = up * (EARTH_RADIUS_KM + rng.gen_range(300.0..1000.0));
        let vel = up.cross(&random_unit(rng)).normalize() * 7.5;
        let offset = random_unit(rng) * rng.gen_range(0.0..0.25);
        let target = (up + offset).normalize() * EARTH_RADIUS_KM;
        (sat, vel, target, random_unit(rng))
    }

    #[test]
    fn mode_supersets_on_random_geometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut counts = [0usize; 3];
        for _ in 0..10_000 {
            let (sat, vel, target, sun) = random_look(&mut rng);
            let Some(look) = look_from_vectors(&sat, &vel, &target, &sun) else {
                continue;
            };
            let base = SensorSpec {
                fov_cross_track_deg: rng.gen_range(0.5..40.0),
                fov_along_track_deg: rng.gen_range(0.5..10.0),
                pointing_mode: PointingMode::NadirFixed,
                for_half_angle_deg: rng.gen_range(0.0..60.0),
                boresight_tilt_cross_track_deg: rng.gen_range(-15.0..15.0),
            };
            let fixed = in_access(&look, &base);
            let cross = in_access(&look, &base.with_mode(PointingMode::CrossTrackAgile));
            let cone = in_access(&look, &base.with_mode(PointingMode::Conical3Dof));
            assert!(!fixed || cross, "{look:?} {base:?}");
            assert!(!cross || cone, "{look:?} {base:?}");
            counts[0] += fixed as usize;
            counts[1] += cross as usize;
            counts[2] += cone as usize;
        }
        assert!(counts[0] < counts[1] && counts[1] < counts[2], "{counts:?}");
    }

    #[test]
    fn vza_never_below_off_nadir() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let (sat, vel, target, sun) = random_look(&mut rng);
            if let Some(look) = look_from_vectors(&sat, &vel, &target, &sun) {
                assert!(look.vza_deg + 1e-9 >= look.off_nadir_deg);
                assert!((0.0..=180.0).contains(&look.sza_deg));
            }
        }
    }

    proptest! {
        #[test]
        fn rotation_invariance(seed in 0u64..5000, ax in -1.0f64..1.0, ay in -1.0f64..1.0, az in -1.0f64..1.0, angle in 0.0f64..6.28) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (sat, vel, target, sun) = random_look(&mut rng);
            let axis = Vec3::new(ax, ay, az);
            prop_assume!(axis.norm() > 1e-3);
            let rot = nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
            let a = look_from_vectors(&sat, &vel, &target, &sun);
            let b = look_from_vectors(&(rot * sat), &(rot * vel), &(rot * target), &(rot * sun));
            prop_assert_eq!(a.is_some(), b.is_some());
            if let (Some(a), Some(b)) = (a, b) {
                prop_assert!((a.off_nadir_deg - b.off_nadir_deg).abs() < 1e-8);
                prop_assert!((a.vza_deg - b.vza_deg).abs() < 1e-8);
                prop_assert!((a.sza_deg - b.sza_deg).abs() < 1e-8);
                prop_assert!((a.roll_deg - b.roll_deg).abs() < 1e-8);
                prop_assert!((a.pitch_deg - b.pitch_deg).abs() < 1e-8);
            }
        }
    }
}
