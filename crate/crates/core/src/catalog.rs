//! Calibration-site catalog ingestion and region gridding.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::astro::GeodeticPoint;
use crate::constants::EARTH_RADIUS_KM;
use crate::error::{Error, Result};

pub const DEFAULT_EXTENT_KM: f64 = 250.0;
pub const GRID_COLUMNS: usize = 20;
pub const GRID_ROWS: usize = 10;
pub const GRID_POINTS: usize = GRID_COLUMNS * GRID_ROWS;
pub const MAX_SITE_LATITUDE_DEG: f64 = 80.0;

/// A square calibration region centered on a site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalSite {
    pub site_id: String,
    pub name: String,
    pub center: GeodeticPoint,
    #[serde(default = "default_extent")]
    pub extent_km: f64,
}

fn default_extent() -> f64 {
    DEFAULT_EXTENT_KM
}

impl CalSite {
    pub fn new(site_id: &str, name: &str, lat_deg: f64, lon_deg: f64) -> Self {
        CalSite {
            site_id: site_id.to_string(),
            name: name.to_string(),
            center: GeodeticPoint::surface(lat_deg, lon_deg),
            extent_km: DEFAULT_EXTENT_KM,
        }
    }

    /// Half-diagonal of the region as an Earth-central angle, degrees.
    pub fn half_diagonal_deg(&self) -> f64 {
        (self.extent_km / 2.0 * std::f64::consts::SQRT_2 / EARTH_RADIUS_KM).to_degrees()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint {
    pub site_id: String,
    pub index: usize,
    pub location: GeodeticPoint,
}

const HEADER: [&str; 4] = ["site_id", "name", "lat_deg", "lon_deg"];

const BUILTIN_PICS: &str = include_str!("../data/pics48.csv");

/// The bundled 48-site catalog of pseudo-invariant calibration sites.
pub fn builtin_sites() -> Vec<CalSite> {
    parse_sites(BUILTIN_PICS.as_bytes(), "builtin:pics48").expect("bundled catalog parses")
}

pub fn load_sites(path: impl AsRef<Path>) -> Result<Vec<CalSite>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_sites(file, &path.display().to_string())
}

/// Parses a site catalog. `source` names the input in error messages.
pub fn parse_sites(reader: impl Read, source: &str) -> Result<Vec<CalSite>> {
    let err = |line: u64, message: String| Error::Catalog {
        path: source.to_string(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let header = rdr.headers()?.clone();
    let header_line = header.position().map_or(1, |p| p.line());
    if header.is_empty() {
        return Ok(Vec::new());
    }
    let names: Vec<&str> = header.iter().collect();
    let header_ok = names.len() >= 4
        && names[..4] == HEADER
        && (names.len() == 4 || (names.len() == 5 && names[4] == "extent_km"));
    if !header_ok {
        return Err(err(
            header_line,
            format!(
                "expected header `site_id,name,lat_deg,lon_deg[,extent_km]`, got `{}`",
                names.join(",")
            ),
        ));
    }

    let mut sites = Vec::new();
    let mut seen = HashSet::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != names.len() && !(record.len() == 4 && names.len() == 5) {
            return Err(err(
                line,
                format!("expected {} fields, found {}", names.len(), record.len()),
            ));
        }
        let number = |i: usize, what: &str| -> Result<f64> {
            record[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(line, format!("invalid {what} `{}`", &record[i])))
        };
        let site_id = record[0].to_string();
        if site_id.is_empty() || site_id.contains(char::is_whitespace) {
            return Err(err(line, format!("invalid site_id `{site_id}`")));
        }
        let lat = number(2, "lat_deg")?;
        let lon = number(3, "lon_deg")?;
        if lat.abs() > MAX_SITE_LATITUDE_DEG {
            return Err(err(
                line,
                format!("latitude {lat} outside +/-{MAX_SITE_LATITUDE_DEG} deg"),
            ));
        }
        if !(-180.0..=180.0).contains(&lon) {
            return Err(err(line, format!("longitude {lon} outside [-180, 180]")));
        }
        let extent_km = if record.len() == 5 && !record[4].is_empty() {
            let v = number(4, "extent_km")?;
            if v <= 0.0 {
                return Err(err(line, format!("extent_km {v} must be positive")));
            }
            v
        } else {
            DEFAULT_EXTENT_KM
        };
        if !seen.insert(site_id.clone()) {
            return Err(err(line, format!("duplicate site_id `{site_id}`")));
        }
        sites.push(CalSite {
            site_id,
            name: record[1].to_string(),
            center: GeodeticPoint::surface(lat, lon),
            extent_km,
        });
    }
    Ok(sites)
}

/// Lays a 20 (east-west) x 10 (north-south) cell-centered lattice over the
/// site's square region. Index = row * 20 + column, row 0 southernmost.
pub fn grid_region(site: &CalSite) -> Result<Vec<GridPoint>> {
    let lat0 = site.center.latitude_deg;
    if lat0.abs() > MAX_SITE_LATITUDE_DEG {
        return Err(Error::SiteLatitude {
            site_id: site.site_id.clone(),
            latitude: lat0,
        });
    }
    let offset = |k: usize, n: usize| site.extent_km * ((k as f64 + 0.5) / n as f64 - 0.5);
    let km_to_lat = (1.0 / EARTH_RADIUS_KM).to_degrees();
    let km_to_lon = km_to_lat / lat0.to_radians().cos();

    let mut points = Vec::with_capacity(GRID_POINTS);
    for row in 0..GRID_ROWS {
        let north = offset(row, GRID_ROWS);
        for col in 0..GRID_COLUMNS {
            let east = offset(col, GRID_COLUMNS);
            points.push(GridPoint {
                site_id: site.site_id.clone(),
                index: row * GRID_COLUMNS + col,
                location: GeodeticPoint::surface(
                    lat0 + north * km_to_lat,
                    site.center.longitude_deg + east * km_to_lon,
                ),
            });
        }
    }
    Ok(points)
}
