//! Cross-calibration opportunity planning.
//!
//! Reference and test access events are matched into opportunities under
//! time, solar-geometry, and view-geometry filters. Vicarious opportunities
//! share a calibration-site grid point; top-of-atmosphere opportunities are
//! ground-track crossovers anywhere on Earth.

mod counts;
mod toa;
mod vicarious;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::access::AccessEvent;
use crate::astro::GeodeticPoint;
use crate::error::{Error, Result};

pub use counts::{count_curve, horizon_sweep, write_counts, CountRow, Countable, COUNTS_HEADER};
pub use toa::{
    toa_crossovers, toa_crossovers_multi, write_crossover_map, CROSSOVER_MAP_HEADER,
    DEFAULT_DEDUPE_WINDOW_S,
};
pub use vicarious::{
    dedupe_to_passes, pair_vicarious, plan_vicarious, PassSpan, RegionOpportunity,
    DEFAULT_PASS_GAP_S,
};

/// Thresholds a reference/test pair must satisfy. Angles in degrees, times in
/// hours. An infinite bound disables that filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterCriteria {
    /// Largest allowed |t_test - t_ref|.
    pub dt_site_max_hours: f64,
    pub dsza_max_deg: f64,
    pub dvza_max_deg: f64,
    pub sza_abs_max_deg: f64,
    pub vza_abs_max_deg: f64,
    /// Both collections must fall within this long after the scenario start.
    pub dt_stab_horizon_hours: f64,
}

impl FilterCriteria {
    /// Only the time bounds; every angular filter off.
    pub fn time_only(dt_site_max_hours: f64, dt_stab_horizon_hours: f64) -> Self {
        FilterCriteria {
            dt_site_max_hours,
            dsza_max_deg: f64::INFINITY,
            dvza_max_deg: f64::INFINITY,
            sza_abs_max_deg: f64::INFINITY,
            vza_abs_max_deg: f64::INFINITY,
            dt_stab_horizon_hours,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("dt_site_max_hours", self.dt_site_max_hours),
            ("dsza_max_deg", self.dsza_max_deg),
            ("dvza_max_deg", self.dvza_max_deg),
            ("sza_abs_max_deg", self.sza_abs_max_deg),
            ("vza_abs_max_deg", self.vza_abs_max_deg),
            ("dt_stab_horizon_hours", self.dt_stab_horizon_hours),
        ];
        for (name, v) in fields {
            if v.is_nan() || v < 0.0 {
                return Err(Error::InvalidCriteria(format!("{name} = {v} must be >= 0")));
            }
        }
        if self.dt_site_max_hours > self.dt_stab_horizon_hours {
            return Err(Error::InvalidCriteria(format!(
                "dt_site_max_hours {} exceeds dt_stab_horizon_hours {}",
                self.dt_site_max_hours, self.dt_stab_horizon_hours
            )));
        }
        Ok(())
    }

    pub(crate) fn dt_site_max_s(&self) -> f64 {
        self.dt_site_max_hours * 3600.0
    }

    pub(crate) fn horizon_s(&self) -> f64 {
        self.dt_stab_horizon_hours * 3600.0
    }

    /// Per-event caps: absolute angles and planning horizon.
    pub(crate) fn admits_event(&self, ev: &AccessEvent) -> bool {
        self.admits(ev.offset_s, ev.sza_deg, ev.vza_deg)
    }

    pub(crate) fn admits(&self, offset_s: f64, sza_deg: f64, vza_deg: f64) -> bool {
        sza_deg <= self.sza_abs_max_deg
            && vza_deg <= self.vza_abs_max_deg
            && offset_s >= 0.0
            && offset_s <= self.horizon_s()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OpportunityKind {
    Vicarious,
    Toa,
}

impl OpportunityKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            OpportunityKind::Vicarious => "VICARIOUS",
            OpportunityKind::Toa => "TOA",
        }
    }
}

impl fmt::Display for OpportunityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One matched (reference, test) collection pair.
#[derive(Debug, Clone, PartialEq)]
pub struct XcalOpportunity {
    pub kind: OpportunityKind,
    pub ref_event: AccessEvent,
    pub test_event: AccessEvent,
    /// Signed, test minus reference.
    pub dt_hours: f64,
    pub dsza_deg: f64,
    pub dvza_deg: f64,
    /// Ground distance between the two sub-satellite points (crossovers only).
    pub ground_distance_km: f64,
}

impl XcalOpportunity {
    pub(crate) fn new(
        kind: OpportunityKind,
        ref_event: AccessEvent,
        test_event: AccessEvent,
    ) -> Self {
        XcalOpportunity {
            kind,
            dt_hours: (test_event.offset_s - ref_event.offset_s) / 3600.0,
            dsza_deg: (ref_event.sza_deg - test_event.sza_deg).abs(),
            dvza_deg: (ref_event.vza_deg - test_event.vza_deg).abs(),
            ground_distance_km: 0.0,
            ref_event,
            test_event,
        }
    }

    pub fn location(&self) -> GeodeticPoint {
        self.ref_event.target.location()
    }

    /// Canonical order: dt, reference epoch, target, satellites, test epoch.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.dt_hours
            .total_cmp(&other.dt_hours)
            .then_with(|| self.ref_event.offset_s.total_cmp(&other.ref_event.offset_s))
            .then_with(|| self.ref_event.target.cmp(&other.ref_event.target))
            .then_with(|| self.ref_event.sat_id.cmp(&other.ref_event.sat_id))
            .then_with(|| self.test_event.sat_id.cmp(&other.test_event.sat_id))
            .then_with(|| {
                self.test_event
                    .offset_s
                    .total_cmp(&other.test_event.offset_s)
            })
    }
}

pub const OPPORTUNITIES_HEADER: [&str; 16] = [
    "kind",
    "ref_sat",
    "test_sat",
    "site_id",
    "lat_deg",
    "lon_deg",
    "grid_index",
    "t_ref_iso",
    "t_test_iso",
    "dt_hours",
    "dsza_deg",
    "dvza_deg",
    "sza_ref_deg",
    "sza_test_deg",
    "vza_ref_deg",
    "vza_test_deg",
];

pub fn write_opportunities<'a>(
    writer: impl std::io::Write,
    opportunities: impl IntoIterator<Item = &'a XcalOpportunity>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(OPPORTUNITIES_HEADER)?;
    for o in opportunities {
        let loc = o.location();
        let (r, t) = (&o.ref_event, &o.test_event);
        w.write_record([
            o.kind.as_str().to_string(),
            r.sat_id.to_string(),
            t.sat_id.to_string(),
            r.target.site_id().unwrap_or("").to_string(),
            format!("{:.4}", loc.latitude_deg),
            format!("{:.4}", loc.longitude_deg),
            r.target
                .grid_index()
                .map(|i| i.to_string())
                .unwrap_or_default(),
            r.epoch.to_iso(),
            t.epoch.to_iso(),
            format!("{:.4}", o.dt_hours),
            format!("{:.3}", o.dsza_deg),
            format!("{:.3}", o.dvza_deg),
            format!("{:.3}", r.sza_deg),
            format!("{:.3}", t.sza_deg),
            format!("{:.3}", r.vza_deg),
            format!("{:.3}", t.vza_deg),
        ])?;
    }
    w.flush().map_err(|e| Error::io("opportunities", e))?;
    Ok(())
}
