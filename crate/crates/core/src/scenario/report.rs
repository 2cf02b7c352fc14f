//! Reshapes `counts.csv` tables into one plot-ready table per criteria label.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
struct CountRecord {
    test_sat: String,
    criteria_label: String,
    dt_threshold_hours: f64,
    horizon_hours: f64,
    count: usize,
}

/// `counts.csv` files under `input`: the directory itself and any `arch*`
/// subdirectories, keyed by series prefix ("" or "arch3:").
fn count_tables(input: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    let top = input.join("counts.csv");
    if top.is_file() {
        out.push((String::new(), top));
    }
    let entries = std::fs::read_dir(input).map_err(|e| Error::io(input, e))?;
    let mut subdirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("counts.csv").is_file())
        .collect();
    subdirs.sort();
    for d in subdirs {
        let name = d
            .file_name()
            .unwrap_or_default()
            .to_string_lossy()
            .to_string();
        out.push((format!("{name}:"), d.join("counts.csv")));
    }
    Ok(out)
}

fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Key wrapper so thresholds sort numerically inside a BTreeMap.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64, f64);
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.1.total_cmp(&other.1).then(self.0.total_cmp(&other.0))
    }
}

/// Renders `report_<label>.csv` tables: one row per (horizon, dt threshold),
/// one column per series.
pub fn render_report(input: &Path) -> Result<Vec<(String, Vec<u8>)>> {
    let tables = count_tables(input)?;
    if tables.is_empty() {
        return Err(Error::config(
            "input",
            format!("no counts.csv under {}", input.display()),
        ));
    }
    let mut by_label: BTreeMap<String, (BTreeSet<String>, BTreeMap<Key, BTreeMap<String, usize>>)> =
        BTreeMap::new();
    let mut series_order: Vec<String> = Vec::new();
    for (prefix, path) in &tables {
        let mut rdr = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::config(path.display().to_string(), format!("{other:?}")),
        })?;
        for rec in rdr.deserialize::<CountRecord>() {
            let rec = rec?;
            let series = format!("{prefix}{}", rec.test_sat);
            if !series_order.contains(&series) {
                series_order.push(series.clone());
            }
            let entry = by_label.entry(rec.criteria_label).or_default();
            entry.0.insert(series.clone());
            entry
                .1
                .entry(Key(rec.dt_threshold_hours, rec.horizon_hours))
                .or_default()
                .insert(series, rec.count);
        }
    }

    let mut files = Vec::new();
    for (label, (present, rows)) in by_label {
        let cols: Vec<&String> = series_order
            .iter()
            .filter(|s| present.contains(*s))
            .collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![
            "horizon_hours".to_string(),
            "dt_threshold_hours".to_string(),
        ];
        header.extend(cols.iter().map(|c| c.to_string()));
        w.write_record(&header)?;
        for (key, counts) in rows {
            let mut rec = vec![format!("{}", key.1), format!("{}", key.0)];
            rec.extend(
                cols.iter()
                    .map(|c| counts.get(*c).map(|n| n.to_string()).unwrap_or_default()),
            );
            w.write_record(&rec)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::io("report", e.into_error()))?;
        files.push((format!("report_{}.csv", file_stem(&label)), bytes));
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pivots_architecture_tables() {
        let dir = tempfile::tempdir().unwrap();
        for (arch, n) in [("arch1", 1), ("arch2", 3)] {
            let d = dir.path().join(arch);
            std::fs::create_dir(&d).unwrap();
            std::fs::write(
                d.join("counts.csv"),
                format!("test_sat,criteria_label,dt_threshold_hours,horizon_hours,count\nD,TOA:x,1,12,{n}\nD,TOA:x,0.5,12,0\n"),
            )
            .unwrap();
        }
        let files = render_report(dir.path()).unwrap();
        assert_eq!(files.len(), 1);
        assert_eq!(files[0].0, "report_TOA_x.csv");
        assert_eq!(
            String::from_utf8(files[0].1.clone()).unwrap(),
            "horizon_hours,dt_threshold_hours,arch1:D,arch2:D\n12,0.5,0,0\n12,1,1,3\n"
        );
    }

    #[test]
    fn empty_directory_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(render_report(dir.path()).is_err());
    }
}
