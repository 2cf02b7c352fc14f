//! Flagship reference, test-satellite, and transfer-radiometer presets.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::access::Satellite;
use crate::astro::{sun_mean_longitude_deg, Epoch};
use crate::error::{Error, Result};
use crate::propagator::{sso_inclination, OrbitalElements};
use crate::sensing::{PointingMode, SensorSpec};

/// Along-track FOV given to pushbroom flagship sensors. Only the cross-track
/// extent matters for coverage; one degree keeps the footprint longer than the
/// ground motion in one fine step.
pub const FLAGSHIP_ALONG_TRACK_FOV_DEG: f64 = 1.0;

/// Small-sat imager: 2 x 3 deg FOV.
pub const SMALLSAT_FOV_DEG: (f64, f64) = (2.0, 3.0);
pub const SMALLSAT_FOR_HALF_ANGLE_DEG: f64 = 27.5;

pub const DEFAULT_TRAILING_DEG: f64 = 5.0;
pub const ISS_ALTITUDE_KM: f64 = 410.0;
pub const ISS_INCLINATION_DEG: f64 = 51.6;

/// RAAN of a sun-synchronous orbit whose descending node crosses at
/// `ltdn_hours` local mean solar time.
pub fn raan_for_ltdn(epoch: Epoch, ltdn_hours: f64) -> f64 {
    let ltan = ltdn_hours + 12.0;
    (sun_mean_longitude_deg(epoch) + (ltan - 12.0) * 15.0).rem_euclid(360.0)
}

#[derive(Debug, Clone, Copy)]
struct Flagship {
    id: &'static str,
    altitude_km: f64,
    fov_cross_track_deg: f64,
    tilt_deg: f64,
    ltdn_hours: f64,
    arg_latitude_deg: f64,
}

const FLAGSHIPS: [Flagship; 6] = [
    Flagship {
        id: "LANDSAT-8",
        altitude_km: 710.0,
        fov_cross_track_deg: 15.0,
        tilt_deg: 0.0,
        ltdn_hours: 10.0 + 11.0 / 60.0,
        arg_latitude_deg: 0.0,
    },
    Flagship {
        id: "LANDSAT-7",
        altitude_km: 710.0,
        fov_cross_track_deg: 15.0,
        tilt_deg: 0.0,
        ltdn_hours: 10.0,
        arg_latitude_deg: 180.0,
    },
    Flagship {
        id: "SENTINEL-2A",
        altitude_km: 788.0,
        fov_cross_track_deg: 20.6,
        tilt_deg: 0.0,
        ltdn_hours: 10.5,
        arg_latitude_deg: 0.0,
    },
    Flagship {
        id: "SENTINEL-2B",
        altitude_km: 788.0,
        fov_cross_track_deg: 20.6,
        tilt_deg: 0.0,
        ltdn_hours: 10.5,
        arg_latitude_deg: 180.0,
    },
    // Tilted toward the right of the descending morning track, away from the Sun.
    Flagship {
        id: "SENTINEL-3A",
        altitude_km: 802.0,
        fov_cross_track_deg: 68.6,
        tilt_deg: 12.6,
        ltdn_hours: 10.0,
        arg_latitude_deg: 0.0,
    },
    Flagship {
        id: "SENTINEL-3B",
        altitude_km: 802.0,
        fov_cross_track_deg: 68.6,
        tilt_deg: 12.6,
        ltdn_hours: 10.0,
        arg_latitude_deg: 140.0,
    },
];

fn sso_circular(
    altitude_km: f64,
    ltdn_hours: f64,
    arg_latitude_deg: f64,
    epoch: Epoch,
) -> Result<OrbitalElements> {
    Ok(OrbitalElements::circular(
        altitude_km,
        sso_inclination(altitude_km)?,
        raan_for_ltdn(epoch, ltdn_hours),
        arg_latitude_deg,
        epoch,
    ))
}

/// The six flagship reference imagers, all nadir-fixed in sun-synchronous orbits.
pub fn flagship_presets(epoch: Epoch) -> Result<Vec<Satellite>> {
    FLAGSHIPS
        .iter()
        .map(|f| {
            let sensor = SensorSpec::nadir(f.fov_cross_track_deg, FLAGSHIP_ALONG_TRACK_FOV_DEG)
                .with_tilt(f.tilt_deg);
            let el = sso_circular(f.altitude_km, f.ltdn_hours, f.arg_latitude_deg, epoch)?;
            Ok(Satellite::new(f.id, el, sensor))
        })
        .collect()
}

/// Knobs for the test-satellite presets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestSatOptions {
    pub pointing_mode: PointingMode,
    pub for_half_angle_deg: f64,
    /// How far each SSO test satellite trails its Landsat in argument of latitude.
    pub trailing_deg: f64,
    pub iss_raan_deg: f64,
    pub iss_arg_latitude_deg: f64,
}

impl Default for TestSatOptions {
    fn default() -> Self {
        TestSatOptions {
            pointing_mode: PointingMode::CrossTrackAgile,
            for_half_angle_deg: SMALLSAT_FOR_HALF_ANGLE_DEG,
            trailing_deg: DEFAULT_TRAILING_DEG,
            iss_raan_deg: 0.0,
            iss_arg_latitude_deg: 0.0,
        }
    }
}

pub fn smallsat_sensor(mode: PointingMode, for_half_angle_deg: f64) -> SensorSpec {
    SensorSpec::agile(
        SMALLSAT_FOV_DEG.0,
        SMALLSAT_FOV_DEG.1,
        mode,
        for_half_angle_deg,
    )
}

/// ISS-deployed Dove plus two SSO Doves trailing Landsat-8 and Landsat-7.
pub fn testsat_presets(epoch: Epoch, opts: &TestSatOptions) -> Result<Vec<Satellite>> {
    let sensor = smallsat_sensor(opts.pointing_mode, opts.for_half_angle_deg);
    let iss = OrbitalElements::circular(
        ISS_ALTITUDE_KM,
        ISS_INCLINATION_DEG,
        opts.iss_raan_deg,
        opts.iss_arg_latitude_deg,
        epoch,
    );
    let mut out = vec![Satellite::new("DOVE-ISS", iss, sensor)];
    for (id, leader) in [
        ("DOVE-SSO-L8", &FLAGSHIPS[0]),
        ("DOVE-SSO-L7", &FLAGSHIPS[1]),
    ] {
        let el = sso_circular(
            leader.altitude_km,
            leader.ltdn_hours,
            leader.arg_latitude_deg - opts.trailing_deg,
            epoch,
        )?;
        out.push(Satellite::new(id, el, sensor));
    }
    Ok(out)
}

/// Which preset a name refers to.
pub fn preset_by_name(name: &str, epoch: Epoch, opts: &TestSatOptions) -> Result<Satellite> {
    flagship_presets(epoch)?
        .into_iter()
        .chain(testsat_presets(epoch, opts)?)
        .find(|s| s.id.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::config("preset", format!("unknown preset {name:?}")))
}

/// Transfer-radiometer constellation topologies: (satellites, planes).
pub const ARCHITECTURES: [(u32, usize, usize); 6] = [
    (1, 1, 1),
    (2, 2, 1),
    (3, 3, 1),
    (4, 4, 2),
    (5, 6, 2),
    (6, 6, 3),
];

pub const TR_ALTITUDE_KM: f64 = 450.0;
pub const TR_INCLINATION_DEG: f64 = 45.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Architecture {
    pub arch_id: u32,
    pub n_sats: usize,
    pub n_planes: usize,
    pub altitude_km: f64,
    pub inclination_deg: f64,
    /// One entry per satellite.
    pub raan_list: Vec<f64>,
    /// Argument of latitude at epoch, one entry per satellite.
    pub phase_list: Vec<f64>,
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "arch {}: {} sats in {} planes",
            self.arch_id, self.n_sats, self.n_planes
        )
    }
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

/// Evenly spaced plane RAANs rotated to maximize the smallest separation from
/// `reference_raans`. Offsets are searched on a 1 deg grid; ties go to the
/// smallest offset.
pub fn plane_raans(n_planes: usize, reference_raans: &[f64]) -> Vec<f64> {
    let spacing = 360.0 / n_planes as f64;
    let planes = |offset: f64| (0..n_planes).map(move |k| offset + k as f64 * spacing);
    let score = |offset: f64| {
        planes(offset)
            .flat_map(|p| {
                reference_raans
                    .iter()
                    .map(move |&r| circular_distance(p, r))
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut best = (0.0, f64::NEG_INFINITY);
    for step in 0..spacing.ceil() as usize {
        let offset = step as f64;
        if offset >= spacing {
            break;
        }
        let s = score(offset);
        if s > best.1 + 1e-9 {
            best = (offset, s);
        }
    }
    planes(best.0).collect()
}

pub fn build_architecture(arch_id: u32, reference_raans: &[f64]) -> Result<Architecture> {
    let &(_, n_sats, n_planes) = ARCHITECTURES
        .iter()
        .find(|a| a.0 == arch_id)
        .ok_or(Error::UnknownArchitecture(arch_id))?;
    let per_plane = n_sats / n_planes;
    let raans = plane_raans(n_planes, reference_raans);
    let mut raan_list = Vec::with_capacity(n_sats);
    let mut phase_list = Vec::with_capacity(n_sats);
    for raan in &raans {
        for k in 0..per_plane {
            raan_list.push(*raan);
            phase_list.push(k as f64 * 360.0 / per_plane as f64);
        }
    }
    Ok(Architecture {
        arch_id,
        n_sats,
        n_planes,
        altitude_km: TR_ALTITUDE_KM,
        inclination_deg: TR_INCLINATION_DEG,
        raan_list,
        phase_list,
    })
}

/// Satellites of an architecture, named `TR-<arch>-<k>`.
pub fn architecture_satellites(
    arch: &Architecture,
    epoch: Epoch,
    sensor: SensorSpec,
) -> Vec<Satellite> {
    arch.raan_list
        .iter()
        .zip(&arch.phase_list)
        .enumerate()
        .map(|(k, (&raan, &phase))| {
            let el = OrbitalElements::circular(
                arch.altitude_km,
                arch.inclination_deg,
                raan,
                phase,
                epoch,
            );
            Satellite::new(&format!("TR-{}-{}", arch.arch_id, k + 1), el, sensor)
        })
        .collect()
}
