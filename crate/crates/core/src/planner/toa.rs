use std::collections::HashMap;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

use super::{FilterCriteria, OpportunityKind, XcalOpportunity};
use crate::access::{
    angle_between, fixed_frame_sample, AccessEvent, Satellite, ScenarioWindow, Target,
};
use crate::astro::{ecef_to_geodetic, Epoch};
use crate::constants::EARTH_RADIUS_KM;
use crate::error::{Error, Result};
use crate::sensing::{earth_central_angle_deg, look_from_vectors, LookGeometry, SensorSpec};
use crate::Vec3;

/// Detections closer than this in both reference and test time merge into one
/// crossover opportunity.
pub const DEFAULT_DEDUPE_WINDOW_S: f64 = 300.0;

struct Track {
    id: Arc<str>,
    position: Vec<Vec3>,
    velocity: Vec<Vec3>,
    unit: Vec<Vec3>,
}

fn sample_track(sat: &Satellite, window: &ScenarioWindow, n: usize) -> Result<Track> {
    let prop = sat.propagator()?;
    let samples = (0..n)
        .into_par_iter()
        .map(|j| fixed_frame_sample(&prop, window.start, window.fine_time(j)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Track {
        id: Arc::from(sat.id.as_str()),
        unit: samples.iter().map(|s| s.position.normalize()).collect(),
        position: samples.iter().map(|s| s.position).collect(),
        velocity: samples.into_iter().map(|s| s.velocity).collect(),
    })
}

/// Earth-central angle (rad) reachable at `off_nadir_deg` from radius `r`,
/// capped at the horizon.
pub(crate) fn reach_rad(r_km: f64, off_nadir_deg: f64) -> f64 {
    let horizon = (EARTH_RADIUS_KM / r_km).acos();
    earth_central_angle_deg(r_km - EARTH_RADIUS_KM, off_nadir_deg)
        .map(f64::to_radians)
        .unwrap_or(horizon)
        .min(horizon)
}

/// View zenith angle at the edge of a nadir-pointed footprint.
pub(crate) fn nadir_edge_vza_deg(sensor: &SensorSpec, r_km: f64) -> (f64, f64) {
    let edge = SensorSpec::nadir(sensor.fov_cross_track_deg, sensor.fov_along_track_deg)
        .max_off_nadir_deg();
    let s = (r_km / EARTH_RADIUS_KM * edge.to_radians().sin()).min(1.0);
    (edge, s.asin().to_degrees())
}

/// A (reference sample, test sample) pair within reach, with the geometry
/// the filters need.
#[derive(Debug, Clone, Copy)]
struct Detection {
    i: usize,
    j: usize,
    distance_rad: f64,
    sza_ref: f64,
    vza_ref: f64,
    look: LookGeometry,
}

type Cell = (i64, i64, i64);

fn cell_of(p: &Vec3, size: f64) -> Cell {
    (
        (p.x / size).floor() as i64,
        (p.y / size).floor() as i64,
        (p.z / size).floor() as i64,
    )
}

/// Margin on the solar prefilter; the exact event geometry decides.
const SZA_SLACK_DEG: f64 = 1e-6;

fn solar_zenith_deg(unit: &Vec3, sun: &Vec3) -> f64 {
    angle_between(unit, sun).to_degrees()
}

/// Ground-track crossovers between nadir-pointed reference satellites and a
/// test satellite's field of regard.
///
/// A crossover is detected at fine samples (t_ref, t_test) when the reference
/// sub-satellite point at t_ref lies within the test sensor's ground reach at
/// t_test. Detections passing every filter are merged greedily in test-time
/// order: a detection joins the earliest open cluster whose first test time is
/// less than `dedupe_window_s` earlier and whose reference times come within
/// `dedupe_window_s` of its own. Each cluster is represented by its closest
/// approach.
pub fn toa_crossovers(
    ref_sats: &[Satellite],
    test_sat: &Satellite,
    window: &ScenarioWindow,
    criteria: &FilterCriteria,
    dedupe_window_s: f64,
) -> Result<Vec<XcalOpportunity>> {
    let mut out = toa_crossovers_multi(
        ref_sats,
        std::slice::from_ref(test_sat),
        window,
        std::slice::from_ref(criteria),
        dedupe_window_s,
    )?;
    Ok(out.pop().unwrap_or_default())
}

/// [`toa_crossovers`] for several test satellites and criteria variants at
/// once, sharing orbit sampling and detection. Returns one canonically sorted
/// list per variant covering every test satellite.
pub fn toa_crossovers_multi(
    ref_sats: &[Satellite],
    test_sats: &[Satellite],
    window: &ScenarioWindow,
    variants: &[FilterCriteria],
    dedupe_window_s: f64,
) -> Result<Vec<Vec<XcalOpportunity>>> {
    window.validate()?;
    for c in variants {
        c.validate()?;
    }
    if !(dedupe_window_s > 0.0) {
        return Err(Error::InvalidCriteria(format!(
            "dedupe window {dedupe_window_s} must be > 0"
        )));
    }
    for s in ref_sats.iter().chain(test_sats) {
        s.sensor.validate()?;
    }
    let mut out = vec![Vec::new(); variants.len()];
    let horizon_s = variants
        .iter()
        .map(|c| c.horizon_s())
        .fold(0.0, f64::max)
        .min(window.duration_s());
    let n = (0..window.fine_sample_count())
        .take_while(|&j| window.fine_time(j) <= horizon_s)
        .count();
    if n == 0 || ref_sats.is_empty() || variants.is_empty() {
        return Ok(out);
    }

    let sun: Vec<Vec3> = (0..n)
        .into_par_iter()
        .map(|j| {
            let epoch = window.start.plus_seconds(window.fine_time(j));
            crate::astro::eci_to_ecef(&crate::astro::sun_position_eci(epoch).direction, epoch)
        })
        .collect();
    let refs = ref_sats
        .iter()
        .map(|s| sample_track(s, window, n))
        .collect::<Result<Vec<_>>>()?;
    for test_sat in test_sats {
        let test = sample_track(test_sat, window, n)?;
        let off_nadir = test_sat.sensor.max_off_nadir_deg();
        let test_reach: Vec<f64> = test
            .position
            .iter()
            .map(|p| reach_rad(p.norm(), off_nadir))
            .collect();
        for (track, sat) in refs.iter().zip(ref_sats) {
            let per_variant = crossovers_for_pair(
                track,
                &sat.sensor,
                &test,
                &test_reach,
                &sun,
                window,
                variants,
                dedupe_window_s,
            );
            for (o, v) in out.iter_mut().zip(per_variant) {
                o.extend(v);
            }
        }
    }
    for o in &mut out {
        o.sort_by(XcalOpportunity::canonical_cmp);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn crossovers_for_pair(
    reference: &Track,
    ref_sensor: &SensorSpec,
    test: &Track,
    test_reach: &[f64],
    sun: &[Vec3],
    window: &ScenarioWindow,
    variants: &[FilterCriteria],
    dedupe_window_s: f64,
) -> Vec<Vec<XcalOpportunity>> {
    let max_reach = test_reach.iter().cloned().fold(0.0, f64::max);
    let cell = 2.0 * EARTH_RADIUS_KM * (max_reach / 2.0).sin() + 1e-9;
    let mut grid: HashMap<Cell, Vec<usize>> = HashMap::new();
    for (i, u) in reference.unit.iter().enumerate() {
        grid.entry(cell_of(&(u * EARTH_RADIUS_KM), cell))
            .or_default()
            .push(i);
    }
    let dt_max = variants
        .iter()
        .map(|c| c.dt_site_max_s())
        .fold(0.0, f64::max);
    // Loosest solar limits, used only to skip detections no variant can keep.
    let sza_cap = variants
        .iter()
        .map(|c| c.sza_abs_max_deg)
        .fold(0.0, f64::max)
        + SZA_SLACK_DEG;
    let dsza_cap = variants.iter().map(|c| c.dsza_max_deg).fold(0.0, f64::max) + SZA_SLACK_DEG;
    let t = |k: usize| window.fine_time(k);

    let detections: Vec<Detection> = (0..test.unit.len())
        .into_par_iter()
        .flat_map_iter(|j| {
            let mut found = Vec::new();
            let tj = t(j);
            let (cx, cy, cz) = cell_of(&(test.unit[j] * EARTH_RADIUS_KM), cell);
            let cos_reach = test_reach[j].cos();
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        let Some(idx) = grid.get(&(cx + dx, cy + dy, cz + dz)) else {
                            continue;
                        };
                        let lo = idx.partition_point(|&i| t(i) < tj - dt_max - 1e-6);
                        for &i in idx[lo..]
                            .iter()
                            .take_while(|&&i| t(i) <= tj + dt_max + 1e-6)
                        {
                            if (tj - t(i)).abs() > dt_max
                                || reference.unit[i].dot(&test.unit[j]) < cos_reach - 1e-12
                            {
                                continue;
                            }
                            let d = angle_between(&reference.unit[i], &test.unit[j]);
                            if d > test_reach[j] {
                                continue;
                            }
                            let sza_ref = solar_zenith_deg(&reference.unit[i], &sun[i]);
                            let sza_test = solar_zenith_deg(&reference.unit[i], &sun[j]);
                            if sza_ref.max(sza_test) > sza_cap
                                || (sza_ref - sza_test).abs() > dsza_cap
                            {
                                continue;
                            }
                            let point = reference.unit[i] * EARTH_RADIUS_KM;
                            if let Some(look) = look_from_vectors(
                                &test.position[j],
                                &test.velocity[j],
                                &point,
                                &sun[j],
                            ) {
                                let (_, vza_ref) =
                                    nadir_edge_vza_deg(ref_sensor, reference.position[i].norm());
                                found.push(Detection {
                                    i,
                                    j,
                                    distance_rad: d,
                                    sza_ref,
                                    vza_ref,
                                    look,
                                });
                            }
                        }
                    }
                }
            }
            found.sort_by_key(|d| d.i);
            found
        })
        .collect();

    variants
        .iter()
        .map(|c| {
            cluster_detections(&detections, c, window, dedupe_window_s)
                .into_iter()
                .filter_map(|det| {
                    let (r, te) = detection_events(reference, ref_sensor, test, window, det)?;
                    let mut o = XcalOpportunity::new(OpportunityKind::Toa, r, te);
                    o.ground_distance_km = det.distance_rad * EARTH_RADIUS_KM;
                    Some(o)
                })
                .collect()
        })
        .collect()
}

/// Merges the detections admitted by `c` and returns each cluster's closest approach.
fn cluster_detections<'a>(
    detections: &'a [Detection],
    c: &FilterCriteria,
    window: &ScenarioWindow,
    dedupe_window_s: f64,
) -> Vec<&'a Detection> {
    // Open clusters: first test sample and the span of reference samples seen.
    struct Cluster {
        anchor_j: f64,
        ref_lo: f64,
        ref_hi: f64,
    }
    let t = |k: usize| window.fine_time(k);
    let mut kept: Vec<&Detection> = Vec::new();
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    for det in detections {
        let (ti, tj) = (t(det.i), t(det.j));
        let look = &det.look;
        if (tj - ti).abs() > c.dt_site_max_s()
            || !(c.admits(ti, det.sza_ref, det.vza_ref) && c.admits(tj, look.sza_deg, look.vza_deg))
            || (det.sza_ref - look.sza_deg).abs() > c.dsza_max_deg
            || (det.vza_ref - look.vza_deg).abs() > c.dvza_max_deg
        {
            continue;
        }
        open.retain(|&k| tj - clusters[k].anchor_j < dedupe_window_s);
        let joined = open.iter().copied().find(|&k| {
            ti > clusters[k].ref_lo - dedupe_window_s && ti < clusters[k].ref_hi + dedupe_window_s
        });
        match joined {
            Some(k) => {
                let cl = &mut clusters[k];
                cl.ref_lo = cl.ref_lo.min(ti);
                cl.ref_hi = cl.ref_hi.max(ti);
                if det.distance_rad < kept[k].distance_rad {
                    kept[k] = det;
                }
            }
            None => {
                clusters.push(Cluster {
                    anchor_j: tj,
                    ref_lo: ti,
                    ref_hi: ti,
                });
                open.push(kept.len());
                kept.push(det);
            }
        }
    }
    kept
}

fn detection_events(
    reference: &Track,
    ref_sensor: &SensorSpec,
    test: &Track,
    window: &ScenarioWindow,
    det: &Detection,
) -> Option<(AccessEvent, AccessEvent)> {
    let (i, j) = (det.i, det.j);
    let point = reference.unit[i] * EARTH_RADIUS_KM;
    let mut location = ecef_to_geodetic(&point).ok()?;
    location.altitude_km = 0.0;
    let look = &det.look;
    let r_ref = reference.position[i].norm();
    let (edge, _) = nadir_edge_vza_deg(ref_sensor, r_ref);
    let target = Target::Toa { location };
    let epoch_at = |k: usize| -> (f64, Epoch) {
        let t = window.fine_time(k);
        (t, window.start.plus_seconds(t))
    };

    let (ti, ei) = epoch_at(i);
    let ref_event = AccessEvent {
        sat_id: reference.id.clone(),
        target: target.clone(),
        offset_s: ti,
        epoch: ei,
        off_nadir_deg: edge,
        vza_deg: det.vza_ref,
        sza_deg: det.sza_ref,
        slant_range_km: r_ref - EARTH_RADIUS_KM,
    };
    let (tj, ej) = epoch_at(j);
    let test_event = AccessEvent {
        sat_id: test.id.clone(),
        target,
        offset_s: tj,
        epoch: ej,
        off_nadir_deg: look.off_nadir_deg,
        vza_deg: look.vza_deg,
        sza_deg: look.sza_deg,
        slant_range_km: look.slant_range_km,
    };
    Some((ref_event, test_event))
}

pub const CROSSOVER_MAP_HEADER: [&str; 5] = ["lat", "lon", "t_ref_iso", "t_test_iso", "dt_hours"];

pub fn write_crossover_map<'a>(
    writer: impl Write,
    opportunities: impl IntoIterator<Item = &'a XcalOpportunity>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CROSSOVER_MAP_HEADER)?;
    for o in opportunities {
        let loc = o.location();
        w.write_record([
            format!("{:.4}", loc.latitude_deg),
            format!("{:.4}", loc.longitude_deg),
            o.ref_event.epoch.to_iso(),
            o.test_event.epoch.to_iso(),
            format!("{:.4}", o.dt_hours),
        ])?;
    }
    w.flush().map_err(|e| Error::io("crossover map", e))?;
    Ok(())
}
