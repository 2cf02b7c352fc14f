use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid calendar date {0}")]
    InvalidDate(String),

    #[error("cannot parse epoch `{input}`: expected YYYY-MM-DDThh:mm:ssZ")]
    EpochParse { input: String },

    #[error("zero-magnitude position vector")]
    ZeroVector,

    #[error("invalid orbital elements: {0}")]
    InvalidElements(String),

    #[error("Kepler solver did not converge (M = {mean_anomaly} rad, e = {eccentricity})")]
    KeplerNonConvergence {
        mean_anomaly: f64,
        eccentricity: f64,
    },

    #[error("no sun-synchronous inclination for altitude {altitude_km} km")]
    NoSsoSolution { altitude_km: f64 },

    #[error("invalid sensor: {0}")]
    InvalidSensor(String),

    #[error("half-angle {half_angle_deg} deg at {altitude_km} km is beyond the Earth limb")]
    BeyondLimb {
        altitude_km: f64,
        half_angle_deg: f64,
    },

    #[error("{path}:{line}: {message}")]
    Catalog {
        path: String,
        line: u64,
        message: String,
    },

    #[error("site `{site_id}` latitude {latitude} deg is outside +/-80 deg")]
    SiteLatitude { site_id: String, latitude: f64 },

    #[error("invalid filter criteria: {0}")]
    InvalidCriteria(String),

    #[error("invalid scenario window: {0}")]
    InvalidWindow(String),

    #[error("unknown architecture id {0} (expected 1-6)")]
    UnknownArchitecture(u32),

    #[error("config `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}
