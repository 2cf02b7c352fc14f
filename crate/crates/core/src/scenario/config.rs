//! TOML scenario configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::presets::{
    architecture_satellites, build_architecture, flagship_presets, smallsat_sensor,
    testsat_presets, TestSatOptions, SMALLSAT_FOR_HALF_ANGLE_DEG,
};
use crate::access::{Satellite, ScenarioWindow, DEFAULT_COARSE_STEP_S, DEFAULT_FINE_STEP_S};
use crate::astro::Epoch;
use crate::catalog::{builtin_sites, load_sites, CalSite};
use crate::error::{Error, Result};
use crate::planner::{FilterCriteria, DEFAULT_DEDUPE_WINDOW_S, DEFAULT_PASS_GAP_S};
use crate::propagator::{sso_inclination, ForceModel, OrbitalElements};
use crate::sensing::{PointingMode, SensorSpec};

pub const BUILTIN_CATALOG: &str = "builtin:pics48";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RunMode {
    Vicarious,
    Toa,
    #[default]
    Both,
}

impl RunMode {
    pub fn vicarious(&self) -> bool {
        matches!(self, RunMode::Vicarious | RunMode::Both)
    }

    pub fn toa(&self) -> bool {
        matches!(self, RunMode::Toa | RunMode::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowConfig {
    pub duration_hours: f64,
    pub coarse_step_s: f64,
    pub fine_step_s: f64,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            duration_hours: 48.0,
            coarse_step_s: DEFAULT_COARSE_STEP_S,
            fine_step_s: DEFAULT_FINE_STEP_S,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineSite {
    pub site_id: String,
    #[serde(default)]
    pub name: String,
    pub lat_deg: f64,
    pub lon_deg: f64,
    #[serde(default = "default_extent")]
    pub extent_km: f64,
}

fn default_extent() -> f64 {
    crate::catalog::DEFAULT_EXTENT_KM
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SitesConfig {
    /// Catalog file, relative to the config file, or `builtin:pics48`.
    pub catalog: Option<String>,
    pub inline: Vec<InlineSite>,
    /// Restrict to these site ids.
    pub include: Vec<String>,
}

/// A satellite spelled out in the config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SatelliteConfig {
    pub id: String,
    pub altitude_km: f64,
    /// Omitted means sun-synchronous.
    pub inclination_deg: Option<f64>,
    pub raan_deg: Option<f64>,
    /// Descending-node local time, hours; sets the RAAN when `raan_deg` is absent.
    pub ltdn_hours: Option<f64>,
    #[serde(default)]
    pub arg_latitude_deg: f64,
    pub sensor: SensorSpec,
    #[serde(default)]
    pub force_model: ForceModel,
}

impl SatelliteConfig {
    fn build(&self, epoch: Epoch, key: &str) -> Result<Satellite> {
        let inc = match self.inclination_deg {
            Some(i) => i,
            None => {
                sso_inclination(self.altitude_km).map_err(|e| Error::config(key, e.to_string()))?
            }
        };
        let raan = match (self.raan_deg, self.ltdn_hours) {
            (Some(r), None) => r,
            (None, Some(h)) => super::presets::raan_for_ltdn(epoch, h),
            _ => {
                return Err(Error::config(
                    key,
                    "exactly one of raan_deg and ltdn_hours is required",
                ))
            }
        };
        let el =
            OrbitalElements::circular(self.altitude_km, inc, raan, self.arg_latitude_deg, epoch);
        el.validate()
            .map_err(|e| Error::config(key, e.to_string()))?;
        self.sensor
            .validate()
            .map_err(|e| Error::config(format!("{key}.sensor"), e.to_string()))?;
        let mut sat = Satellite::new(&self.id, el, self.sensor);
        sat.force_model = self.force_model;
        Ok(sat)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReferenceConfig {
    /// Preset names, or `flagships` for all six.
    pub presets: Vec<String>,
    /// Transfer-radiometer architecture id (1-6) added to the fleet.
    pub architecture: Option<u32>,
    /// Sensor of the transfer radiometers.
    pub tr_sensor: Option<SensorSpec>,
    pub satellites: Vec<SatelliteConfig>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestConfig {
    /// Preset names, or `doves` for all three.
    pub presets: Vec<String>,
    pub options: TestSatOptions,
    pub satellites: Vec<SatelliteConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CriteriaConfig {
    pub dt_grid_hours: Vec<f64>,
    /// Time-gap grid for crossovers; defaults to `dt_grid_hours`.
    pub toa_dt_grid_hours: Option<Vec<f64>>,
    pub horizons_hours: Vec<f64>,
    /// Each combination of one dsza and one dvza bound is a criteria variant.
    pub dsza_max_deg: Vec<f64>,
    pub dvza_max_deg: Vec<f64>,
    pub sza_abs_max_deg: f64,
    pub vza_abs_max_deg: f64,
    pub toa_dedupe_window_s: f64,
    pub pass_gap_s: f64,
}

impl Default for CriteriaConfig {
    fn default() -> Self {
        CriteriaConfig {
            dt_grid_hours: (1..=96).map(|k| k as f64 * 0.5).collect(),
            toa_dt_grid_hours: None,
            horizons_hours: vec![48.0],
            dsza_max_deg: vec![f64::INFINITY],
            dvza_max_deg: vec![f64::INFINITY],
            sza_abs_max_deg: f64::INFINITY,
            vza_abs_max_deg: f64::INFINITY,
            toa_dedupe_window_s: DEFAULT_DEDUPE_WINDOW_S,
            pass_gap_s: DEFAULT_PASS_GAP_S,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub access_events: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub epoch: Epoch,
    #[serde(default)]
    pub mode: RunMode,
    #[serde(default)]
    pub window: WindowConfig,
    #[serde(default)]
    pub sites: SitesConfig,
    #[serde(default)]
    pub reference: ReferenceConfig,
    #[serde(default)]
    pub test: TestConfig,
    #[serde(default)]
    pub criteria: CriteriaConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Directory that relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// One (dsza, dvza) combination.
#[derive(Debug, Clone, PartialEq)]
pub struct CriteriaVariant {
    pub label: String,
    pub criteria: FilterCriteria,
}

fn fmt_bound(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v}")
    }
}

impl ScenarioConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, base)
    }

    pub fn from_toml(text: &str, base_dir: PathBuf) -> Result<Self> {
        let mut cfg: ScenarioConfig = toml::from_str(text).map_err(|e| {
            let key = e
                .span()
                .map(|s| format!("byte {}", s.start))
                .unwrap_or_else(|| "<root>".into());
            Error::config(key, e.message().to_string())
        })?;
        cfg.base_dir = base_dir;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical TOML form, used for the run manifest.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let w = self.window();
        w.validate()
            .map_err(|e| Error::config("window", e.to_string()))?;
        let c = &self.criteria;
        let nonempty = |key: &str, v: &[f64]| {
            if v.is_empty() {
                return Err(Error::config(
                    format!("criteria.{key}"),
                    "must not be empty",
                ));
            }
            if let Some(bad) = v.iter().find(|x| x.is_nan() || **x < 0.0) {
                return Err(Error::config(
                    format!("criteria.{key}"),
                    format!("{bad} must be >= 0"),
                ));
            }
            Ok(())
        };
        nonempty("dt_grid_hours", &c.dt_grid_hours)?;
        if let Some(g) = &c.toa_dt_grid_hours {
            nonempty("toa_dt_grid_hours", g)?;
        }
        nonempty("horizons_hours", &c.horizons_hours)?;
        nonempty("dsza_max_deg", &c.dsza_max_deg)?;
        nonempty("dvza_max_deg", &c.dvza_max_deg)?;
        if !(c.toa_dedupe_window_s > 0.0) {
            return Err(Error::config("criteria.toa_dedupe_window_s", "must be > 0"));
        }
        if !(c.pass_gap_s > 0.0) {
            return Err(Error::config("criteria.pass_gap_s", "must be > 0"));
        }
        for (toa, key) in [
            (false, "criteria.dt_grid_hours"),
            (true, "criteria.toa_dt_grid_hours"),
        ] {
            for v in self.variants(toa) {
                v.criteria
                    .validate()
                    .map_err(|e| Error::config(key, e.to_string()))?;
            }
        }
        if self.test.presets.is_empty() && self.test.satellites.is_empty() {
            return Err(Error::config(
                "test",
                "at least one test satellite is required",
            ));
        }
        if self.mode.vicarious() && self.sites.catalog.is_none() && self.sites.inline.is_empty() {
            return Err(Error::config(
                "sites",
                "vicarious mode needs a catalog or inline sites",
            ));
        }
        Ok(())
    }

    pub fn window(&self) -> ScenarioWindow {
        ScenarioWindow {
            start: self.epoch,
            duration_hours: self.window.duration_hours,
            coarse_step_s: self.window.coarse_step_s,
            fine_step_s: self.window.fine_step_s,
        }
    }

    /// Time-gap thresholds for one mode.
    pub fn dt_grid(&self, toa: bool) -> &[f64] {
        match (&self.criteria.toa_dt_grid_hours, toa) {
            (Some(g), true) => g,
            _ => &self.criteria.dt_grid_hours,
        }
    }

    pub fn max_dt_hours(&self, toa: bool) -> f64 {
        self.dt_grid(toa).iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_horizon_hours(&self) -> f64 {
        self.criteria
            .horizons_hours
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }

    /// Criteria variants in (dsza, dvza) order as listed, for vicarious
    /// pairing or for crossovers.
    pub fn variants(&self, toa: bool) -> Vec<CriteriaVariant> {
        let c = &self.criteria;
        let mut out = Vec::new();
        for &dsza in &c.dsza_max_deg {
            for &dvza in &c.dvza_max_deg {
                out.push(CriteriaVariant {
                    label: format!("dsza={}:dvza={}", fmt_bound(dsza), fmt_bound(dvza)),
                    criteria: FilterCriteria {
                        dt_site_max_hours: self.max_dt_hours(toa),
                        dsza_max_deg: dsza,
                        dvza_max_deg: dvza,
                        sza_abs_max_deg: c.sza_abs_max_deg,
                        vza_abs_max_deg: c.vza_abs_max_deg,
                        dt_stab_horizon_hours: self.max_horizon_hours(),
                    },
                });
            }
        }
        out
    }

    /// Index of the loosest variant (largest dsza, then dvza).
    pub fn loosest_variant(&self) -> usize {
        let c = &self.criteria;
        let i = (0..c.dsza_max_deg.len())
            .max_by(|&a, &b| {
                c.dsza_max_deg[a]
                    .total_cmp(&c.dsza_max_deg[b])
                    .then(b.cmp(&a))
            })
            .unwrap_or(0);
        let j = (0..c.dvza_max_deg.len())
            .max_by(|&a, &b| {
                c.dvza_max_deg[a]
                    .total_cmp(&c.dvza_max_deg[b])
                    .then(b.cmp(&a))
            })
            .unwrap_or(0);
        i * c.dvza_max_deg.len() + j
    }

    pub fn sites(&self) -> Result<Vec<CalSite>> {
        let mut sites = match &self.sites.catalog {
            None => Vec::new(),
            Some(c) if c == BUILTIN_CATALOG => builtin_sites(),
            Some(c) => load_sites(self.base_dir.join(c))?,
        };
        for (k, s) in self.sites.inline.iter().enumerate() {
            if s.lat_deg.abs() > crate::catalog::MAX_SITE_LATITUDE_DEG || !(s.extent_km > 0.0) {
                return Err(Error::config(
                    format!("sites.inline[{k}]"),
                    "latitude beyond 80 deg or bad extent",
                ));
            }
            let mut site = CalSite::new(&s.site_id, &s.name, s.lat_deg, s.lon_deg);
            site.extent_km = s.extent_km;
            sites.push(site);
        }
        if !self.sites.include.is_empty() {
            for id in &self.sites.include {
                if !sites.iter().any(|s| &s.site_id == id) {
                    return Err(Error::config(
                        "sites.include",
                        format!("unknown site {id:?}"),
                    ));
                }
            }
            sites.retain(|s| self.sites.include.contains(&s.site_id));
        }
        let mut seen = std::collections::BTreeSet::new();
        for s in &sites {
            if !seen.insert(&s.site_id) {
                return Err(Error::config(
                    "sites",
                    format!("duplicate site id {:?}", s.site_id),
                ));
            }
        }
        Ok(sites)
    }

    /// Reference fleet without any transfer-radiometer architecture.
    pub fn base_reference_satellites(&self) -> Result<Vec<Satellite>> {
        let flagships = flagship_presets(self.epoch)?;
        let mut out = Vec::new();
        for (k, name) in self.reference.presets.iter().enumerate() {
            if name.eq_ignore_ascii_case("flagships") {
                out.extend(flagships.iter().cloned());
                continue;
            }
            match flagships.iter().find(|s| s.id.eq_ignore_ascii_case(name)) {
                Some(s) => out.push(s.clone()),
                None => {
                    return Err(Error::config(
                        format!("reference.presets[{k}]"),
                        format!("unknown flagship {name:?}"),
                    ))
                }
            }
        }
        for (k, s) in self.reference.satellites.iter().enumerate() {
            out.push(s.build(self.epoch, &format!("reference.satellites[{k}]"))?);
        }
        Ok(out)
    }

    pub fn tr_sensor(&self) -> SensorSpec {
        self.reference.tr_sensor.unwrap_or_else(|| {
            smallsat_sensor(PointingMode::Conical3Dof, SMALLSAT_FOR_HALF_ANGLE_DEG)
        })
    }

    /// Transfer radiometers of architecture `arch_id`, with planes placed
    /// away from the flagship planes.
    pub fn architecture_satellites(&self, arch_id: u32) -> Result<Vec<Satellite>> {
        let raans: Vec<f64> = flagship_presets(self.epoch)?
            .iter()
            .map(|s| s.elements.raan_deg)
            .collect();
        let arch = build_architecture(arch_id, &raans)
            .map_err(|e| Error::config("reference.architecture", e.to_string()))?;
        Ok(architecture_satellites(&arch, self.epoch, self.tr_sensor()))
    }

    pub fn reference_satellites(&self) -> Result<Vec<Satellite>> {
        let mut out = self.base_reference_satellites()?;
        if let Some(id) = self.reference.architecture {
            out.extend(self.architecture_satellites(id)?);
        }
        if out.is_empty() {
            return Err(Error::config(
                "reference",
                "at least one reference satellite is required",
            ));
        }
        check_unique(&out, "reference")?;
        Ok(out)
    }

    pub fn test_satellites(&self) -> Result<Vec<Satellite>> {
        let doves = testsat_presets(self.epoch, &self.test.options)?;
        let mut out = Vec::new();
        for (k, name) in self.test.presets.iter().enumerate() {
            if name.eq_ignore_ascii_case("doves") {
                out.extend(doves.iter().cloned());
                continue;
            }
            match doves.iter().find(|s| s.id.eq_ignore_ascii_case(name)) {
                Some(s) => out.push(s.clone()),
                None => {
                    return Err(Error::config(
                        format!("test.presets[{k}]"),
                        format!("unknown test preset {name:?}"),
                    ))
                }
            }
        }
        for (k, s) in self.test.satellites.iter().enumerate() {
            out.push(s.build(self.epoch, &format!("test.satellites[{k}]"))?);
        }
        check_unique(&out, "test")?;
        Ok(out)
    }
}

fn check_unique(sats: &[Satellite], key: &str) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for s in sats {
        if !seen.insert(&s.id) {
            return Err(Error::config(
                key,
                format!("duplicate satellite id {:?}", s.id),
            ));
        }
    }
    Ok(())
}
