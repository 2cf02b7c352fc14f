use std::io::Write;

use super::{RegionOpportunity, XcalOpportunity};
use crate::error::{Error, Result};

/// Thresholds are compared with this much slack (hours) so grid values such
/// as 0.1 h do not miss members sitting exactly on them.
const THRESHOLD_EPS_H: f64 = 1e-9;

/// Anything that can be counted on a (dt threshold, horizon) grid.
pub trait Countable {
    fn test_sat(&self) -> &str;
    /// True when the item has a member with |dt| ≤ `dt_max_hours` whose both
    /// collections finish within `horizon_hours` of the scenario start.
    fn counts_at(&self, dt_max_hours: f64, horizon_hours: f64) -> bool;
}

impl Countable for XcalOpportunity {
    fn test_sat(&self) -> &str {
        &self.test_event.sat_id
    }

    fn counts_at(&self, dt_max_hours: f64, horizon_hours: f64) -> bool {
        let done = self.ref_event.offset_s.max(self.test_event.offset_s);
        self.dt_hours.abs() <= dt_max_hours && done <= horizon_hours * 3600.0
    }
}

impl Countable for RegionOpportunity {
    fn test_sat(&self) -> &str {
        &self.test_sat
    }

    fn counts_at(&self, dt_max_hours: f64, horizon_hours: f64) -> bool {
        self.has_member_within(dt_max_hours, horizon_hours)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountRow {
    pub test_sat: String,
    pub criteria_label: String,
    pub dt_threshold_hours: f64,
    pub horizon_hours: f64,
    pub count: usize,
}

fn count<T: Countable>(items: &[T], sat: &str, dt: f64, horizon: f64) -> usize {
    items
        .iter()
        .filter(|o| {
            o.test_sat() == sat && o.counts_at(dt + THRESHOLD_EPS_H, horizon + THRESHOLD_EPS_H)
        })
        .count()
}

/// Cumulative counts over a grid of dt thresholds at a fixed horizon, one row
/// per (test satellite, threshold). Satellites with no opportunities still
/// get all-zero rows.
pub fn count_curve<T: Countable>(
    items: &[T],
    test_sats: &[String],
    criteria_label: &str,
    dt_grid_hours: &[f64],
    horizon_hours: f64,
) -> Vec<CountRow> {
    let mut rows = Vec::new();
    for sat in test_sats {
        for &dt in dt_grid_hours {
            rows.push(CountRow {
                test_sat: sat.clone(),
                criteria_label: criteria_label.to_string(),
                dt_threshold_hours: dt,
                horizon_hours,
                count: count(items, sat, dt, horizon_hours),
            });
        }
    }
    rows
}

/// Counts over a grid of planning horizons at a fixed dt threshold.
pub fn horizon_sweep<T: Countable>(
    items: &[T],
    test_sats: &[String],
    criteria_label: &str,
    horizons_hours: &[f64],
    dt_threshold_hours: f64,
) -> Vec<CountRow> {
    let mut rows = Vec::new();
    for sat in test_sats {
        for &h in horizons_hours {
            rows.push(CountRow {
                test_sat: sat.clone(),
                criteria_label: criteria_label.to_string(),
                dt_threshold_hours,
                horizon_hours: h,
                count: count(items, sat, dt_threshold_hours, h),
            });
        }
    }
    rows
}

pub const COUNTS_HEADER: [&str; 5] = [
    "test_sat",
    "criteria_label",
    "dt_threshold_hours",
    "horizon_hours",
    "count",
];

pub fn write_counts(writer: impl Write, rows: &[CountRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(COUNTS_HEADER)?;
    for r in rows {
        w.write_record([
            r.test_sat.clone(),
            r.criteria_label.clone(),
            format!("{}", r.dt_threshold_hours),
            format!("{}", r.horizon_hours),
            r.count.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("counts", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::{AccessEvent, Target};
    use crate::astro::{Epoch, GeodeticPoint};
    use crate::planner::OpportunityKind;
    use std::sync::Arc;

    fn opp(test_sat: &str, t_ref: f64, t_test: f64) -> XcalOpportunity {
        let ev = |sat: &str, t: f64| AccessEvent {
            sat_id: Arc::from(sat),
            target: Target::Toa {
                location: GeodeticPoint::surface(0.0, 0.0),
            },
            offset_s: t,
            epoch: Epoch::J2000.plus_seconds(t),
            off_nadir_deg: 0.0,
            vza_deg: 0.0,
            sza_deg: 30.0,
            slant_range_km: 500.0,
        };
        XcalOpportunity::new(OpportunityKind::Toa, ev("REF", t_ref), ev(test_sat, t_test))
    }

    fn sats() -> Vec<String> {
        vec!["A".into(), "B".into()]
    }

    #[test]
    fn empty_list_gives_zero_curve() {
        let rows = count_curve::<XcalOpportunity>(&[], &sats(), "x", &[1.0, 2.0], 48.0);
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.count == 0));
    }

    #[test]
    fn curve_is_cumulative() {
        let items: Vec<_> = (0..50).map(|k| opp("A", 0.0, k as f64 * 360.0)).collect();
        let grid: Vec<f64> = (0..=60).map(|k| k as f64 * 0.1).collect();
        let rows = count_curve(&items, &sats(), "x", &grid, 48.0);
        let a: Vec<usize> = rows
            .iter()
            .filter(|r| r.test_sat == "A")
            .map(|r| r.count)
            .collect();
        assert!(a.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*a.last().unwrap(), 50);
        // 0.1 h thresholds hit members at exactly k * 360 s.
        assert_eq!(a[1], 2);
        assert!(rows
            .iter()
            .filter(|r| r.test_sat == "B")
            .all(|r| r.count == 0));
    }

    #[test]
    fn horizon_sweep_nested() {
        let items: Vec<_> = (0..40)
            .map(|k| opp("B", k as f64 * 3600.0, k as f64 * 3600.0 + 60.0))
            .collect();
        let rows = horizon_sweep(&items, &sats(), "x", &[0.0, 6.0, 12.0, 48.0], 1.0);
        let b: Vec<usize> = rows
            .iter()
            .filter(|r| r.test_sat == "B")
            .map(|r| r.count)
            .collect();
        assert_eq!(b, vec![0, 6, 12, 40]);
    }

    #[test]
    fn counts_csv_header() {
        let mut buf = Vec::new();
        write_counts(
            &mut buf,
            &count_curve::<XcalOpportunity>(&[], &["A".into()], "loose", &[0.5], 48.0),
        )
        .unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "test_sat,criteria_label,dt_threshold_hours,horizon_hours,count\nA,loose,0.5,48,0\n"
        );
    }
}
