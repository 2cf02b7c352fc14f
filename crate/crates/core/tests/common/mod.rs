//! Brute-force oracles and random scenario builders shared by the
//! integration tests and the acceptance harness.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use xcal::access::{AccessEvent, Satellite, ScenarioWindow, Target};
use xcal::astro::{eci_to_ecef, geodetic_to_ecef, Epoch, GeodeticPoint};
use xcal::catalog::{grid_region, CalSite};
use xcal::constants::{EARTH_RADIUS_KM, EARTH_ROTATION_RAD_S, MU_EARTH};
use xcal::planner::FilterCriteria;
use xcal::propagator::OrbitalElements;
use xcal::sensing::{in_access, look_geometry, PointingMode, SensorSpec};
use xcal::Vec3;

pub fn epoch() -> Epoch {
    Epoch::from_calendar(2020, 3, 20, 0, 0, 0.0).unwrap()
}

/// Every (sat, site, grid index, sample index) in access, by direct evaluation
/// of every fine sample against every grid point.
pub fn brute_access(
    sats: &[Satellite],
    sites: &[CalSite],
    window: &ScenarioWindow,
) -> BTreeSet<(String, String, usize, usize)> {
    let mut out = BTreeSet::new();
    let grids: Vec<_> = sites.iter().map(|s| grid_region(s).unwrap()).collect();
    for sat in sats {
        let prop = sat.propagator().unwrap();
        let lag = window.start.seconds_since(sat.elements.epoch);
        for k in 0..window.fine_sample_count() {
            let state = prop.state_at(lag + window.fine_time(k)).unwrap();
            for g in grids.iter().flatten() {
                if let Some(look) = look_geometry(&state, &g.location) {
                    if in_access(&look, &sat.sensor) {
                        out.insert((sat.id.clone(), g.site_id.clone(), g.index, k));
                    }
                }
            }
        }
    }
    out
}

/// All admissible (ref index, test index) pairs by exhaustive comparison.
pub fn brute_pairs(
    refs: &[AccessEvent],
    tests: &[AccessEvent],
    c: &FilterCriteria,
) -> Vec<(usize, usize)> {
    let admits = |e: &AccessEvent| {
        e.sza_deg <= c.sza_abs_max_deg
            && e.vza_deg <= c.vza_abs_max_deg
            && e.offset_s >= 0.0
            && e.offset_s <= c.dt_stab_horizon_hours * 3600.0
    };
    let mut out = Vec::new();
    for (i, r) in refs.iter().enumerate() {
        if !admits(r) {
            continue;
        }
        for (j, t) in tests.iter().enumerate() {
            if r.target == t.target
                && admits(t)
                && (t.offset_s - r.offset_s).abs() <= c.dt_site_max_hours * 3600.0
                && (r.sza_deg - t.sza_deg).abs() <= c.dsza_max_deg
                && (r.vza_deg - t.vza_deg).abs() <= c.dvza_max_deg
            {
                out.push((i, j));
            }
        }
    }
    out
}

/// Random grid-level events for `n_sats` satellites over a few sites.
pub fn random_events(
    rng: &mut ChaCha8Rng,
    prefix: &str,
    n_sats: usize,
    n: usize,
    sites: usize,
) -> Vec<AccessEvent> {
    let ids: Vec<std::sync::Arc<str>> =
        (0..n_sats).map(|k| format!("{prefix}{k}").into()).collect();
    let site_ids: Vec<std::sync::Arc<str>> = (0..sites).map(|k| format!("S{k}").into()).collect();
    (0..n)
        .map(|_| {
            let offset_s = rng.gen_range(0..172_800) as f64;
            let vza = rng.gen_range(0.0..40.0);
            AccessEvent {
                sat_id: ids[rng.gen_range(0..n_sats)].clone(),
                target: Target::Grid {
                    site_id: site_ids[rng.gen_range(0..sites)].clone(),
                    index: rng.gen_range(0..20),
                    location: GeodeticPoint::surface(0.0, 0.0),
                },
                offset_s,
                epoch: epoch().plus_seconds(offset_s),
                off_nadir_deg: vza,
                vza_deg: vza,
                sza_deg: rng.gen_range(10.0..100.0),
                slant_range_km: 700.0,
            }
        })
        .collect()
}

pub fn random_criteria(rng: &mut ChaCha8Rng) -> FilterCriteria {
    let pick = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| {
        if rng.gen_bool(0.2) {
            f64::INFINITY
        } else {
            rng.gen_range(lo..hi)
        }
    };
    let dt = rng.gen_range(0.1..6.0);
    FilterCriteria {
        dt_site_max_hours: dt,
        dsza_max_deg: pick(rng, 0.5, 20.0),
        dvza_max_deg: pick(rng, 0.5, 20.0),
        sza_abs_max_deg: pick(rng, 40.0, 100.0),
        vza_abs_max_deg: pick(rng, 10.0, 40.0),
        dt_stab_horizon_hours: rng.gen_range(dt..48.0),
    }
}

/// A random circular LEO satellite.
pub fn random_sat(rng: &mut ChaCha8Rng, id: &str, sensor: SensorSpec) -> Satellite {
    let el = OrbitalElements::circular(
        rng.gen_range(400.0..850.0),
        rng.gen_range(0.0..180.0),
        rng.gen_range(0.0..360.0),
        rng.gen_range(0.0..360.0),
        epoch(),
    );
    Satellite::new(id, el, sensor)
}

pub fn random_agile(rng: &mut ChaCha8Rng, mode: PointingMode) -> SensorSpec {
    SensorSpec::agile(
        rng.gen_range(1.0..5.0),
        rng.gen_range(1.0..5.0),
        mode,
        rng.gen_range(10.0..35.0),
    )
}

/// Random mid-latitude sites.
pub fn random_sites(rng: &mut ChaCha8Rng, n: usize) -> Vec<CalSite> {
    (0..n)
        .map(|k| {
            CalSite::new(
                &format!("R{k}"),
                "random",
                rng.gen_range(-60.0..60.0),
                rng.gen_range(-180.0..180.0),
            )
        })
        .collect()
}

/// A crossover found by the proximity oracle.
#[derive(Debug, Clone, Copy)]
pub struct OracleCrossover {
    pub t_ref: f64,
    pub t_test: f64,
    pub distance_km: f64,
}

/// Earth-fixed unit vectors of the sub-satellite point every `step` seconds.
fn ground_track(sat: &Satellite, window: &ScenarioWindow, step: f64, n: usize) -> Vec<Vec3> {
    let prop = sat.propagator().unwrap();
    let lag = window.start.seconds_since(sat.elements.epoch);
    (0..n)
        .map(|k| {
            let t = k as f64 * step;
            let s = prop.state_at(lag + t).unwrap();
            eci_to_ecef(&s.position, window.start.plus_seconds(t)).normalize()
        })
        .collect()
}

/// Ground-track proximity oracle on a `step`-second lattice: every (t_ref,
/// t_test) with |dt| within the limit whose ref nadir point is inside the
/// test sensor's reach, merged with the same greedy rule as the planner.
/// Only geometric and time limits are applied.
pub fn toa_oracle(
    reference: &Satellite,
    test: &Satellite,
    window: &ScenarioWindow,
    c: &FilterCriteria,
    dedupe_s: f64,
    step: f64,
) -> Vec<OracleCrossover> {
    let horizon = (c.dt_stab_horizon_hours * 3600.0).min(window.duration_s());
    let n = (horizon / step + 1e-9).floor() as usize + 1;
    let a = ground_track(reference, window, step, n);
    let b = ground_track(test, window, step, n);
    let r_test = test.elements.semimajor_axis_km;
    let reach = reach_rad(r_test, test.sensor.max_off_nadir_deg());
    // Bound on the angular speed of the reference nadir point, for skipping
    // samples that cannot yet be within reach.
    let ref_rate = ((MU_EARTH / reference.elements.semimajor_axis_km.powi(3)).sqrt()
        + EARTH_ROTATION_RAD_S)
        * 1.05;
    let dt_max = c.dt_site_max_hours * 3600.0;

    let mut dets = Vec::new();
    for j in 0..n {
        let tj = j as f64 * step;
        let lo = ((tj - dt_max) / step).ceil().max(0.0) as usize;
        let hi = (((tj + dt_max) / step).floor() as usize).min(n - 1);
        let mut i = lo;
        while i <= hi {
            let d = a[i].cross(&b[j]).norm().atan2(a[i].dot(&b[j]));
            if d <= reach {
                let ti = i as f64 * step;
                if (tj - ti).abs() <= dt_max {
                    dets.push((i, j, d));
                }
                i += 1;
            } else {
                let skip = ((d - reach) / ref_rate / step).floor() as usize;
                i += skip.max(1);
            }
        }
    }

    // Greedy merge in test-time order, mirroring the planner's rule.
    struct Cl {
        anchor: f64,
        lo: f64,
        hi: f64,
        best: OracleCrossover,
    }
    let mut clusters: Vec<Cl> = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    for (i, j, d) in dets {
        let (ti, tj) = (i as f64 * step, j as f64 * step);
        open.retain(|&k| tj - clusters[k].anchor < dedupe_s);
        let hit = open
            .iter()
            .copied()
            .find(|&k| ti > clusters[k].lo - dedupe_s && ti < clusters[k].hi + dedupe_s);
        let x = OracleCrossover {
            t_ref: ti,
            t_test: tj,
            distance_km: d * EARTH_RADIUS_KM,
        };
        match hit {
            Some(k) => {
                let cl = &mut clusters[k];
                cl.lo = cl.lo.min(ti);
                cl.hi = cl.hi.max(ti);
                if x.distance_km < cl.best.distance_km {
                    cl.best = x;
                }
            }
            None => {
                open.push(clusters.len());
                clusters.push(Cl {
                    anchor: tj,
                    lo: ti,
                    hi: ti,
                    best: x,
                });
            }
        }
    }
    clusters.into_iter().map(|c| c.best).collect()
}

/// Earth-central angle reachable from radius `r` at `off_nadir_deg`, capped at the horizon.
pub fn reach_rad(r: f64, off_nadir_deg: f64) -> f64 {
    let eta = off_nadir_deg.to_radians();
    let s = r / EARTH_RADIUS_KM * eta.sin();
    let horizon = (EARTH_RADIUS_KM / r).acos();
    if s >= 1.0 {
        return horizon;
    }
    (s.asin() - eta).min(horizon)
}

/// Distance between two surface points, km.
pub fn surface_km(a: &GeodeticPoint, b: &GeodeticPoint) -> f64 {
    let (u, v) = (
        geodetic_to_ecef(a).normalize(),
        geodetic_to_ecef(b).normalize(),
    );
    u.cross(&v).norm().atan2(u.dot(&v)) * EARTH_RADIUS_KM
}

/// Counts for one scenario under one set of criteria.
fn scenario_counts(
    refs: &[Satellite],
    test: &Satellite,
    sites: &[CalSite],
    window: &ScenarioWindow,
    c: &FilterCriteria,
) -> (usize, usize) {
    use xcal::planner::{
        plan_vicarious, toa_crossovers, DEFAULT_DEDUPE_WINDOW_S, DEFAULT_PASS_GAP_S,
    };
    let re = xcal::access::compute_accesses(refs, sites, window).unwrap();
    let te = xcal::access::compute_accesses(std::slice::from_ref(test), sites, window).unwrap();
    let vic = plan_vicarious(&re, &te, c, DEFAULT_PASS_GAP_S).len();
    let toa = toa_crossovers(refs, test, window, c, DEFAULT_DEDUPE_WINDOW_S)
        .unwrap()
        .len();
    (vic, toa)
}

/// Checks that vicarious region and crossover counts never drop when one
/// limit is relaxed or the test sensor gains pointing freedom. Returns the
/// number of comparisons, a description of each violation, and the
/// unrelaxed (vicarious, crossover) counts.
pub fn monotonicity_check(seed: u64) -> (usize, Vec<String>, (usize, usize)) {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let window = ScenarioWindow::new(epoch(), 24.0);
    let refs: Vec<Satellite> = (0..2)
        .map(|k| {
            let sensor = SensorSpec::nadir(rng.gen_range(10.0..40.0), 2.0);
            random_sat(&mut rng, &format!("REF{k}"), sensor)
        })
        .collect();
    let agile = random_agile(&mut rng, PointingMode::CrossTrackAgile);
    // A test orbit near the first reference orbit keeps revisits frequent.
    let r0 = &refs[0].elements;
    let el = OrbitalElements::circular(
        rng.gen_range(400.0..850.0),
        r0.inclination_deg + rng.gen_range(-5.0..5.0),
        r0.raan_deg + rng.gen_range(-15.0..15.0),
        rng.gen_range(0.0..360.0),
        epoch(),
    );
    let test = Satellite::new("TST", el, agile);
    let mut sites = random_sites(&mut rng, 1);
    for k in 0..12 {
        let sat = if k % 2 == 0 { &test } else { &refs[0] };
        let state = sat
            .propagator()
            .unwrap()
            .state_at(rng.gen_range(0.0..60_000.0))
            .unwrap();
        let p = xcal::sensing::nadir_point(&state);
        if p.latitude_deg.abs() < 75.0 {
            sites.push(CalSite::new(
                &format!("U{k}"),
                "under",
                p.latitude_deg,
                p.longitude_deg,
            ));
        }
    }
    let dt = rng.gen_range(2.0..8.0);
    let base = FilterCriteria {
        dt_site_max_hours: dt,
        dsza_max_deg: rng.gen_range(10.0..40.0),
        dvza_max_deg: rng.gen_range(10.0..40.0),
        sza_abs_max_deg: rng.gen_range(80.0..120.0),
        vza_abs_max_deg: rng.gen_range(40.0..80.0),
        // Leaves room to relax dt without passing the horizon.
        dt_stab_horizon_hours: rng.gen_range(dt * 1.5..18.0),
    };

    let mut relaxed = Vec::new();
    relaxed.push((
        "dt_site_max",
        FilterCriteria {
            dt_site_max_hours: base.dt_site_max_hours * 1.5,
            ..base
        },
    ));
    relaxed.push((
        "dsza_max",
        FilterCriteria {
            dsza_max_deg: base.dsza_max_deg + 5.0,
            ..base
        },
    ));
    relaxed.push((
        "dvza_max",
        FilterCriteria {
            dvza_max_deg: base.dvza_max_deg + 10.0,
            ..base
        },
    ));
    relaxed.push((
        "dt_stab_horizon",
        FilterCriteria {
            dt_stab_horizon_hours: base.dt_stab_horizon_hours + 6.0,
            ..base
        },
    ));

    let mut checks = 0;
    let mut bad = Vec::new();
    let mut compare = |what: &str, a: (usize, usize), b: (usize, usize)| {
        checks += 2;
        if b.0 < a.0 {
            bad.push(format!("seed {seed}: vicarious {what}: {} -> {}", a.0, b.0));
        }
        if b.1 < a.1 {
            bad.push(format!("seed {seed}: toa {what}: {} -> {}", a.1, b.1));
        }
    };

    let with_mode = |m: PointingMode| Satellite {
        sensor: agile.with_mode(m),
        ..test.clone()
    };
    let start = scenario_counts(
        &refs,
        &with_mode(PointingMode::CrossTrackAgile),
        &sites,
        &window,
        &base,
    );
    for (what, c) in &relaxed {
        let b = scenario_counts(
            &refs,
            &with_mode(PointingMode::CrossTrackAgile),
            &sites,
            &window,
            c,
        );
        compare(what, start, b);
    }
    let nadir = scenario_counts(
        &refs,
        &with_mode(PointingMode::NadirFixed),
        &sites,
        &window,
        &base,
    );
    let conical = scenario_counts(
        &refs,
        &with_mode(PointingMode::Conical3Dof),
        &sites,
        &window,
        &base,
    );
    compare("NADIR_FIXED -> CROSS_TRACK_AGILE", nadir, start);
    compare("CROSS_TRACK_AGILE -> CONICAL_3DOF", start, conical);
    (checks, bad, start)
}
