use std::fmt;

use chrono::{Datelike, NaiveDateTime, Timelike};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::constants::{JD_J2000, SECONDS_PER_DAY};
use crate::error::{Error, Result};

const MS_PER_DAY: i64 = 86_400_000;

/// Broken-down calendar date and time of day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalendarDateTime {
    pub year: i32,
    pub month: u32,
    pub day: u32,
    pub hour: u32,
    pub minute: u32,
    pub second: f64,
}

fn is_leap(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

fn days_in_month(year: i32, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap(year) => 29,
        _ => 28,
    }
}

/// Continuous Julian Date of a Gregorian calendar instant.
pub fn jd_from_calendar(
    year: i32,
    month: u32,
    day: u32,
    hour: u32,
    minute: u32,
    second: f64,
) -> Result<f64> {
    let describe = || format!("{year:04}-{month:02}-{day:02}T{hour:02}:{minute:02}:{second}");
    if year < 1901 {
        return Err(Error::InvalidDate(format!(
            "{} (year must be >= 1901)",
            describe()
        )));
    }
    if !(1..=12).contains(&month) || day == 0 || day > days_in_month(year, month) {
        return Err(Error::InvalidDate(describe()));
    }
    if hour > 23 || minute > 59 || !(0.0..60.0).contains(&second) {
        return Err(Error::InvalidDate(describe()));
    }

    // Fliegel & Van Flandern day number, integer arithmetic.
    let (y, m, d) = (year as i64, month as i64, day as i64);
    let a = (m - 14) / 12;
    let jdn = (1461 * (y + 4800 + a)) / 4 + (367 * (m - 2 - 12 * a)) / 12
        - (3 * ((y + 4900 + a) / 100)) / 4
        + d
        - 32075;
    let day_fraction = (hour as f64 * 3600.0 + minute as f64 * 60.0 + second) / SECONDS_PER_DAY;
    Ok(jdn as f64 - 0.5 + day_fraction)
}

/// Inverse of [`jd_from_calendar`], resolved to the nearest millisecond.
pub fn calendar_from_jd(julian_day: f64) -> CalendarDateTime {
    let total_ms = ((julian_day + 0.5) * MS_PER_DAY as f64).round() as i64;
    let z = total_ms.div_euclid(MS_PER_DAY);
    let ms_of_day = total_ms.rem_euclid(MS_PER_DAY);

    // Meeus, Astronomical Algorithms ch. 7, Gregorian branch.
    let alpha = ((z as f64 - 1_867_216.25) / 36_524.25).floor() as i64;
    let a = z + 1 + alpha - alpha / 4;
    let b = a + 1524;
    let c = ((b as f64 - 122.1) / 365.25).floor() as i64;
    let d = (365.25 * c as f64).floor() as i64;
    let e = ((b - d) as f64 / 30.6001).floor() as i64;
    let day = b - d - (30.6001 * e as f64).floor() as i64;
    let month = if e < 14 { e - 1 } else { e - 13 };
    let year = if month > 2 { c - 4716 } else { c - 4715 };

    CalendarDateTime {
        year: year as i32,
        month: month as u32,
        day: day as u32,
        hour: (ms_of_day / 3_600_000) as u32,
        minute: (ms_of_day / 60_000 % 60) as u32,
        second: (ms_of_day % 60_000) as f64 / 1000.0,
    }
}

/// Greenwich mean sidereal time, degrees in [0, 360).
///
/// IAU 1982 polynomial in Julian centuries of UT1 since J2000.
pub fn gmst_deg(epoch: Epoch) -> f64 {
    let d = epoch.julian_day - JD_J2000;
    let t = d / 36_525.0;
    let theta =
        280.460_618_37 + 360.985_647_366_29 * d + 0.000_387_933 * t * t - t * t * t / 38_710_000.0;
    theta.rem_euclid(360.0)
}

/// An instant on the continuous UT-like scale, stored as a Julian Date.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Epoch {
    pub julian_day: f64,
}

impl Epoch {
    pub const J2000: Epoch = Epoch {
        julian_day: JD_J2000,
    };

    pub fn from_jd(julian_day: f64) -> Self {
        Epoch { julian_day }
    }

    pub fn from_calendar(
        year: i32,
        month: u32,
        day: u32,
        hour: u32,
        minute: u32,
        second: f64,
    ) -> Result<Self> {
        jd_from_calendar(year, month, day, hour, minute, second).map(Epoch::from_jd)
    }

    /// Parses `YYYY-MM-DDThh:mm:ssZ` (fractional seconds are accepted).
    pub fn parse_iso(input: &str) -> Result<Self> {
        let err = || Error::EpochParse {
            input: input.to_string(),
        };
        let trimmed = input.trim();
        let body = trimmed.strip_suffix('Z').ok_or_else(err)?;
        let dt = NaiveDateTime::parse_from_str(body, "%Y-%m-%dT%H:%M:%S%.f").map_err(|_| err())?;
        let second = dt.second() as f64 + dt.nanosecond() as f64 * 1e-9;
        Epoch::from_calendar(
            dt.year(),
            dt.month(),
            dt.day(),
            dt.hour(),
            dt.minute(),
            second,
        )
    }

    pub fn calendar(&self) -> CalendarDateTime {
        calendar_from_jd(self.julian_day)
    }

    /// `YYYY-MM-DDThh:mm:ssZ`, rounded to the nearest second.
    pub fn to_iso(&self) -> String {
        let rounded = Epoch::from_jd(
            ((self.julian_day + 0.5) * SECONDS_PER_DAY).round() / SECONDS_PER_DAY - 0.5,
        );
        let c = rounded.calendar();
        format!(
            "{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z",
            c.year,
            c.month,
            c.day,
            c.hour,
            c.minute,
            c.second.round() as u32
        )
    }

    pub fn plus_seconds(&self, seconds: f64) -> Epoch {
        Epoch::from_jd(self.julian_day + seconds / SECONDS_PER_DAY)
    }

    /// Seconds elapsed since `start` (negative if `self` precedes it).
    pub fn seconds_since(&self, start: Epoch) -> f64 {
        (self.julian_day - start.julian_day) * SECONDS_PER_DAY
    }

    pub fn days_since_j2000(&self) -> f64 {
        self.julian_day - JD_J2000
    }
}

impl fmt::Display for Epoch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_iso())
    }
}

impl Serialize for Epoch {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_iso())
    }
}

impl<'de> Deserialize<'de> for Epoch {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Epoch::parse_iso(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{NaiveDate, TimeZone, Utc};

    // Independent route: Unix time from chrono, shifted to the JD of 1970-01-01.
    fn jd_via_unix(y: i32, mo: u32, d: u32, h: u32, mi: u32, s: u32) -> f64 {
        let t = Utc
            .with_ymd_and_hms(y, mo, d, h, mi, s)
            .unwrap()
            .timestamp();
        2_440_587.5 + t as f64 / 86_400.0
    }

    #[test]
    fn j2000_definition() {
        assert_eq!(
            jd_from_calendar(2000, 1, 1, 12, 0, 0.0).unwrap(),
            2_451_545.0
        );
    }

    #[test]
    fn matches_unix_oracle() {
        assert_eq!(jd_via_unix(1970, 1, 1, 0, 0, 0), 2_440_587.5);
        assert_eq!(jd_via_unix(2019, 1, 1, 0, 0, 0), 2_458_484.5);
        assert_eq!(
            jd_from_calendar(1970, 1, 1, 0, 0, 0.0).unwrap(),
            2_440_587.5
        );
        assert_eq!(
            jd_from_calendar(2019, 1, 1, 0, 0, 0.0).unwrap(),
            2_458_484.5
        );
        for &(y, mo, d, h, mi, s) in &[
            (1901, 3, 1, 0, 0, 0),
            (1999, 12, 31, 23, 59, 59),
            (2016, 2, 29, 6, 30, 15),
            (2024, 7, 4, 18, 1, 2),
            (2049, 11, 30, 1, 1, 1),
        ] {
            let ours = jd_from_calendar(y, mo, d, h, mi, s as f64).unwrap();
            assert!((ours - jd_via_unix(y, mo, d, h, mi, s)).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_invalid_dates() {
        assert!(jd_from_calendar(2019, 2, 29, 0, 0, 0.0).is_err());
        assert!(jd_from_calendar(2019, 13, 1, 0, 0, 0.0).is_err());
        assert!(jd_from_calendar(2019, 4, 31, 0, 0, 0.0).is_err());
        assert!(jd_from_calendar(2019, 1, 1, 24, 0, 0.0).is_err());
        assert!(jd_from_calendar(2019, 1, 1, 0, 60, 0.0).is_err());
        assert!(jd_from_calendar(2019, 1, 1, 0, 0, 60.0).is_err());
        assert!(jd_from_calendar(1900, 1, 1, 0, 0, 0.0).is_err());
        assert!(jd_from_calendar(2020, 2, 29, 0, 0, 0.0).is_ok());
    }

    #[test]
    fn iso_round_trip() {
        let e = Epoch::parse_iso("2019-03-20T21:58:00Z").unwrap();
        assert_eq!(e.to_iso(), "2019-03-20T21:58:00Z");
        assert!(Epoch::parse_iso("2019-03-20 21:58:00").is_err());
        assert!(Epoch::parse_iso("2019-02-30T00:00:00Z").is_err());
        let later = e.plus_seconds(3601.0);
        assert_eq!(later.to_iso(), "2019-03-20T22:58:01Z");
        assert!((later.seconds_since(e) - 3601.0).abs() < 1e-4);
    }

    #[test]
    fn to_iso_carries_over_midnight() {
        let e = Epoch::parse_iso("2019-12-31T23:59:59.7Z").unwrap();
        assert_eq!(e.to_iso(), "2020-01-01T00:00:00Z");
    }

    #[test]
    fn gmst_reference_values() {
        assert!((gmst_deg(Epoch::J2000) - 280.46).abs() < 0.01);
        let sidereal_day = 360.0 / 360.985_647_366_29;
        let later = Epoch::from_jd(JD_J2000 + sidereal_day);
        assert!((gmst_deg(later) - gmst_deg(Epoch::J2000)).abs() < 1e-3);
        let half = Epoch::from_jd(JD_J2000 + sidereal_day / 2.0);
        let diff = (gmst_deg(half) - gmst_deg(Epoch::J2000) - 180.0).rem_euclid(360.0);
        assert!(diff.min(360.0 - diff) < 1e-3);
    }

    #[test]
    fn gmst_solar_day_advance() {
        let e = Epoch::parse_iso("2021-06-01T00:00:00Z").unwrap();
        let adv = (gmst_deg(e.plus_seconds(86_400.0)) - gmst_deg(e)).rem_euclid(360.0);
        assert!((adv + 360.0 - 360.9856).abs() < 0.01);
    }

    #[test]
    fn chrono_parses_same_instant() {
        let e = Epoch::parse_iso("2007-08-09T10:11:12Z").unwrap();
        let dt = NaiveDate::from_ymd_opt(2007, 8, 9)
            .unwrap()
            .and_hms_opt(10, 11, 12)
            .unwrap();
        let unix = dt.and_utc().timestamp() as f64;
        assert!((e.julian_day - (2_440_587.5 + unix / 86_400.0)).abs() < 1e-9);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn calendar_round_trip_within_a_millisecond(
                year in 1901i32..2100,
                month in 1u32..=12,
                day in 1u32..=28,
                hour in 0u32..24,
                minute in 0u32..60,
                ms in 0u32..60_000,
            ) {
                let second = ms as f64 / 1000.0;
                let jd = jd_from_calendar(year, month, day, hour, minute, second).unwrap();
                let c = calendar_from_jd(jd);
                prop_assert_eq!((c.year, c.month, c.day, c.hour, c.minute), (year, month, day, hour, minute));
                prop_assert!((c.second - second).abs() <= 1e-3);
            }

            #[test]
            fn julian_day_is_monotone(a in 0i64..4_000_000_000, b in 0i64..4_000_000_000) {
                let base = Epoch::parse_iso("1950-01-01T00:00:00Z").unwrap();
                let (ea, eb) = (base.plus_seconds(a as f64), base.plus_seconds(b as f64));
                prop_assert_eq!(a < b, ea.julian_day < eb.julian_day);
            }
        }
    }
}
