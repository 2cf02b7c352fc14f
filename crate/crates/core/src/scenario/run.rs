//! Pipeline orchestration and output files.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;

use super::config::{CriteriaVariant, ScenarioConfig};
use crate::access::{compute_accesses, write_access_events, AccessEvent, Satellite};
use crate::catalog::CalSite;
use crate::constants;
use crate::error::{Error, Result};
use crate::planner::{
    count_curve, horizon_sweep, plan_vicarious, toa_crossovers_multi, write_counts,
    write_crossover_map, write_opportunities, CountRow, Countable, FilterCriteria,
    RegionOpportunity, XcalOpportunity,
};
use crate::sensing::nadir_point;

/// Everything one scenario run produces, before it is written out.
#[derive(Debug, Clone)]
pub struct ScenarioResults {
    pub reference_ids: Vec<String>,
    pub test_ids: Vec<String>,
    pub access_events: Vec<AccessEvent>,
    /// Per criteria variant: (label, region opportunities).
    pub vicarious: Vec<(String, Vec<RegionOpportunity>)>,
    /// Per criteria variant: (label, crossover opportunities).
    pub toa: Vec<(String, Vec<XcalOpportunity>)>,
    pub counts: Vec<CountRow>,
    /// Variant whose opportunities go to `opportunities.csv`.
    pub loosest: usize,
}

impl ScenarioResults {
    pub fn vicarious_for(&self, label: &str) -> Option<&[RegionOpportunity]> {
        self.vicarious
            .iter()
            .find(|v| v.0 == label)
            .map(|v| v.1.as_slice())
    }

    pub fn toa_for(&self, label: &str) -> Option<&[XcalOpportunity]> {
        self.toa
            .iter()
            .find(|v| v.0 == label)
            .map(|v| v.1.as_slice())
    }
}

/// Accesses of `sats` to `sites`, or nothing when vicarious mode is off.
pub fn scenario_accesses(
    cfg: &ScenarioConfig,
    sats: &[Satellite],
    sites: &[CalSite],
) -> Result<Vec<AccessEvent>> {
    if !cfg.mode.vicarious() {
        return Ok(Vec::new());
    }
    compute_accesses(sats, sites, &cfg.window())
}

fn curves<T: Countable>(
    cfg: &ScenarioConfig,
    toa: bool,
    items: &[T],
    test_ids: &[String],
    label: &str,
    rows: &mut Vec<CountRow>,
) {
    let c = &cfg.criteria;
    let horizon = cfg.max_horizon_hours();
    let dt_max = cfg.max_dt_hours(toa);
    rows.extend(count_curve(
        items,
        test_ids,
        label,
        cfg.dt_grid(toa),
        horizon,
    ));
    let sweep: Vec<f64> = c
        .horizons_hours
        .iter()
        .copied()
        .filter(|&h| h != horizon)
        .collect();
    rows.extend(horizon_sweep(items, test_ids, label, &sweep, dt_max));
}

/// Runs pairing and crossover detection given precomputed access events.
///
/// `test_events` are the test satellites' site accesses; passing them in lets
/// architecture sweeps reuse one computation.
pub fn run_with_events(
    cfg: &ScenarioConfig,
    refs: &[Satellite],
    tests: &[Satellite],
    ref_events: &[AccessEvent],
    test_events: &[AccessEvent],
) -> Result<ScenarioResults> {
    let test_ids: Vec<String> = tests.iter().map(|s| s.id.clone()).collect();
    let mut counts = Vec::new();

    let mut vicarious = Vec::new();
    if cfg.mode.vicarious() {
        for CriteriaVariant { label, criteria } in &cfg.variants(false) {
            let regions =
                plan_vicarious(ref_events, test_events, criteria, cfg.criteria.pass_gap_s);
            curves(
                cfg,
                false,
                &regions,
                &test_ids,
                &format!("VICARIOUS:{label}"),
                &mut counts,
            );
            vicarious.push((label.clone(), regions));
        }
    }

    let mut toa = Vec::new();
    if cfg.mode.toa() {
        let window = cfg.window();
        let variants = cfg.variants(true);
        let criteria: Vec<FilterCriteria> = variants.iter().map(|v| v.criteria.clone()).collect();
        let per_variant = toa_crossovers_multi(
            refs,
            tests,
            &window,
            &criteria,
            cfg.criteria.toa_dedupe_window_s,
        )?;
        for (CriteriaVariant { label, .. }, opps) in variants.into_iter().zip(per_variant) {
            curves(
                cfg,
                true,
                &opps,
                &test_ids,
                &format!("TOA:{label}"),
                &mut counts,
            );
            toa.push((label, opps));
        }
    }

    let mut access_events = Vec::new();
    if cfg.output.access_events {
        access_events.extend(ref_events.iter().cloned());
        access_events.extend(test_events.iter().cloned());
        access_events.par_sort_by(AccessEvent::canonical_cmp);
    }

    Ok(ScenarioResults {
        reference_ids: refs.iter().map(|s| s.id.clone()).collect(),
        test_ids,
        access_events,
        vicarious,
        toa,
        counts,
        loosest: cfg.loosest_variant(),
    })
}

/// Full pipeline for a parsed configuration, without touching the filesystem.
pub fn run_config(cfg: &ScenarioConfig) -> Result<ScenarioResults> {
    let refs = cfg.reference_satellites()?;
    let tests = cfg.test_satellites()?;
    let sites = if cfg.mode.vicarious() {
        cfg.sites()?
    } else {
        Vec::new()
    };
    let ref_events = scenario_accesses(cfg, &refs, &sites)?;
    let test_events = scenario_accesses(cfg, &tests, &sites)?;
    run_with_events(cfg, &refs, &tests, &ref_events, &test_events)
}

/// Output files of a run, rendered in memory.
pub fn render_outputs(
    cfg: &ScenarioConfig,
    results: &ScenarioResults,
    seed: Option<u64>,
) -> Result<Vec<(String, Vec<u8>)>> {
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    let mut rows: Vec<(String, usize)> = Vec::new();

    if cfg.output.access_events {
        let mut buf = Vec::new();
        write_access_events(&mut buf, &results.access_events)?;
        rows.push(("access_events.csv".into(), results.access_events.len()));
        files.push(("access_events.csv".into(), buf));
    }

    let vic: Vec<&XcalOpportunity> = results
        .vicarious
        .get(results.loosest)
        .map(|v| v.1.iter().flat_map(|r| r.image_options.iter()).collect())
        .unwrap_or_default();
    let toa: Vec<&XcalOpportunity> = results
        .toa
        .get(results.loosest)
        .map(|v| v.1.iter().collect())
        .unwrap_or_default();
    let mut buf = Vec::new();
    write_opportunities(&mut buf, vic.iter().chain(toa.iter()).copied())?;
    rows.push(("opportunities.csv".into(), vic.len() + toa.len()));
    files.push(("opportunities.csv".into(), buf));

    let mut buf = Vec::new();
    write_counts(&mut buf, &results.counts)?;
    rows.push(("counts.csv".into(), results.counts.len()));
    files.push(("counts.csv".into(), buf));

    let mut buf = Vec::new();
    write_crossover_map(&mut buf, toa.iter().copied())?;
    rows.push(("crossover_map.csv".into(), toa.len()));
    files.push(("crossover_map.csv".into(), buf));

    let regions: Vec<serde_json::Value> = results
        .vicarious
        .iter()
        .map(|(label, r)| {
            json!({
                "criteria": label,
                "region_opportunities": r.len(),
                "image_options": r.iter().map(|g| g.image_options.len()).sum::<usize>(),
            })
        })
        .collect();
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "config_toml": cfg.to_toml(),
        "constants": {
            "mu_km3_s2": constants::MU_EARTH,
            "earth_radius_km": constants::EARTH_RADIUS_KM,
            "j2": constants::J2,
            "earth_rotation_rad_s": constants::EARTH_ROTATION_RAD_S,
            "sso_raan_rate_deg_day": constants::SSO_RAAN_RATE_DEG_PER_DAY,
        },
        "reference_satellites": results.reference_ids,
        "test_satellites": results.test_ids,
        "vicarious": regions,
        "toa": results.toa.iter().map(|(l, o)| json!({"criteria": l, "opportunities": o.len()})).collect::<Vec<_>>(),
        "outputs": rows.iter().map(|(f, n)| json!({"file": f, "rows": n})).collect::<Vec<_>>(),
    });
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    files.push(("manifest.json".into(), text.into_bytes()));
    Ok(files)
}

pub const STATES_HEADER: [&str; 11] = [
    "sat_id",
    "epoch_iso",
    "t_offset_s",
    "x_km",
    "y_km",
    "z_km",
    "vx_km_s",
    "vy_km_s",
    "vz_km_s",
    "lat_deg",
    "lon_deg",
];

/// Inertial states and sub-satellite points of every configured satellite,
/// sampled every `step_s` over the window.
pub fn render_states(cfg: &ScenarioConfig, step_s: f64) -> Result<Vec<u8>> {
    if !(step_s > 0.0) {
        return Err(Error::config("step", "must be > 0"));
    }
    let window = cfg.window();
    let mut sats = cfg.reference_satellites()?;
    sats.extend(cfg.test_satellites()?);
    let n = (window.duration_s() / step_s).floor() as usize;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(STATES_HEADER)?;
    for sat in &sats {
        let prop = sat.propagator()?;
        for k in 0..=n {
            let t = k as f64 * step_s;
            let epoch = window.start.plus_seconds(t);
            let s = prop.state_at(epoch.seconds_since(sat.elements.epoch))?;
            let sub = nadir_point(&s);
            let (p, v) = (s.position, s.velocity);
            w.write_record([
                sat.id.clone(),
                epoch.to_iso(),
                format!("{t}"),
                format!("{:.6}", p.x),
                format!("{:.6}", p.y),
                format!("{:.6}", p.z),
                format!("{:.9}", v.x),
                format!("{:.9}", v.y),
                format!("{:.9}", v.z),
                format!("{:.6}", sub.latitude_deg),
                format!("{:.6}", sub.longitude_deg),
            ])?;
        }
    }
    w.into_inner()
        .map_err(|e| Error::io("states", e.into_error()))
}

/// Writes every file or none: on any failure the files already written are removed.
pub fn write_outputs(out_dir: &Path, files: &[(String, Vec<u8>)]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    for (name, bytes) in files {
        let path = out_dir.join(name);
        if let Err(e) = std::fs::write(&path, bytes) {
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            return Err(Error::io(path, e));
        }
        written.push(path);
    }
    Ok(written)
}

/// Loads `config_path`, runs the pipeline, and writes outputs into `out_dir`.
pub fn run_scenario(
    config_path: impl AsRef<Path>,
    out_dir: impl AsRef<Path>,
) -> Result<ScenarioResults> {
    let cfg = ScenarioConfig::load(config_path)?;
    let results = run_config(&cfg)?;
    write_outputs(out_dir.as_ref(), &render_outputs(&cfg, &results, None)?)?;
    Ok(results)
}

/// Architecture sweep: each architecture alone as the reference fleet against the
/// configured test satellites. Test-side accesses are computed once.
pub fn evaluate_architectures(cfg: &ScenarioConfig) -> Result<Vec<(u32, ScenarioResults)>> {
    let tests = cfg.test_satellites()?;
    let sites = if cfg.mode.vicarious() {
        cfg.sites()?
    } else {
        Vec::new()
    };
    let test_events = scenario_accesses(cfg, &tests, &sites)?;
    let mut out = Vec::new();
    for (arch_id, _, _) in super::presets::ARCHITECTURES {
        let refs = cfg.architecture_satellites(arch_id)?;
        let ref_events = scenario_accesses(cfg, &refs, &sites)?;
        out.push((
            arch_id,
            run_with_events(cfg, &refs, &tests, &ref_events, &test_events)?,
        ));
    }
    Ok(out)
}
