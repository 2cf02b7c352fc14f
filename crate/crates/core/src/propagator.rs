//! Two-body Keplerian propagation with first-order J2 secular drift of the
//! node, perigee, and mean anomaly.

use serde::{Deserialize, Serialize};

use crate::astro::{EciState, Epoch};
use crate::constants::{EARTH_RADIUS_KM, J2, MU_EARTH, SECONDS_PER_DAY, SSO_RAAN_RATE_DEG_PER_DAY};
use crate::error::{Error, Result};
use crate::Vec3;

const KEPLER_TOLERANCE: f64 = 1e-12;
const KEPLER_MAX_ITER: usize = 50;

/// Keplerian state of one satellite at an epoch. Angles in degrees.
///
/// Circular orbits use `eccentricity = 0`, `arg_perigee_deg = 0`, and measure
/// `true_anomaly_deg` from the ascending node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitalElements {
    pub semimajor_axis_km: f64,
    pub eccentricity: f64,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    pub arg_perigee_deg: f64,
    pub true_anomaly_deg: f64,
    pub epoch: Epoch,
}

impl OrbitalElements {
    pub fn circular(
        altitude_km: f64,
        inclination_deg: f64,
        raan_deg: f64,
        arg_latitude_deg: f64,
        epoch: Epoch,
    ) -> Self {
        OrbitalElements {
            semimajor_axis_km: EARTH_RADIUS_KM + altitude_km,
            eccentricity: 0.0,
            inclination_deg,
            raan_deg: raan_deg.rem_euclid(360.0),
            arg_perigee_deg: 0.0,
            true_anomaly_deg: arg_latitude_deg.rem_euclid(360.0),
            epoch,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidElements(m));
        if !(self.eccentricity >= 0.0 && self.eccentricity < 1.0) {
            return bad(format!("eccentricity {} outside [0, 1)", self.eccentricity));
        }
        if !(self.semimajor_axis_km > 0.0 && self.semimajor_axis_km.is_finite()) {
            return bad(format!("semimajor axis {} km", self.semimajor_axis_km));
        }
        if !(0.0..=180.0).contains(&self.inclination_deg) {
            return bad(format!(
                "inclination {} deg outside [0, 180]",
                self.inclination_deg
            ));
        }
        Ok(())
    }

    pub fn perigee_altitude_km(&self) -> f64 {
        self.semimajor_axis_km * (1.0 - self.eccentricity) - EARTH_RADIUS_KM
    }

    /// Unperturbed mean motion, rad/s.
    pub fn mean_motion(&self) -> f64 {
        (MU_EARTH / self.semimajor_axis_km.powi(3)).sqrt()
    }

    pub fn period_s(&self) -> f64 {
        std::f64::consts::TAU / self.mean_motion()
    }
}

/// Secular J2 drift rates, deg/day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct J2Rates {
    pub raan_rate: f64,
    pub arg_perigee_rate: f64,
    pub mean_anomaly_correction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ForceModel {
    TwoBody,
    #[default]
    J2Secular,
}

fn rad_s_to_deg_day(rate: f64) -> f64 {
    rate.to_degrees() * SECONDS_PER_DAY
}

/// First-order secular rates in rad/s: (node, perigee, mean-anomaly correction).
fn secular_rates_rad_s(a: f64, e: f64, inc_rad: f64) -> (f64, f64, f64) {
    let n = (MU_EARTH / a.powi(3)).sqrt();
    let p = a * (1.0 - e * e);
    let k = n * J2 * (EARTH_RADIUS_KM / p).powi(2);
    let c = inc_rad.cos();
    let raan = -1.5 * k * c;
    let argp = 0.75 * k * (5.0 * c * c - 1.0);
    let mean = 0.75 * k * (1.0 - e * e).sqrt() * (3.0 * c * c - 1.0);
    (raan, argp, mean)
}

pub fn j2_secular_rates(elements: &OrbitalElements) -> J2Rates {
    let (raan, argp, mean) = secular_rates_rad_s(
        elements.semimajor_axis_km,
        elements.eccentricity,
        elements.inclination_deg.to_radians(),
    );
    J2Rates {
        raan_rate: rad_s_to_deg_day(raan),
        arg_perigee_rate: rad_s_to_deg_day(argp),
        mean_anomaly_correction: rad_s_to_deg_day(mean),
    }
}

/// Solves `E - e sin E = M` by Newton iteration.
pub fn solve_kepler(mean_anomaly: f64, eccentricity: f64) -> Result<f64> {
    let m = (mean_anomaly + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU)
        - std::f64::consts::PI;
    if eccentricity == 0.0 {
        return Ok(m);
    }
    let mut ecc_anom = if eccentricity < 0.8 {
        m
    } else {
        std::f64::consts::PI * m.signum()
    };
    for _ in 0..KEPLER_MAX_ITER {
        let f = ecc_anom - eccentricity * ecc_anom.sin() - m;
        let step = f / (1.0 - eccentricity * ecc_anom.cos());
        ecc_anom -= step;
        if step.abs() < KEPLER_TOLERANCE {
            return Ok(ecc_anom);
        }
    }
    Err(Error::KeplerNonConvergence {
        mean_anomaly,
        eccentricity,
    })
}

fn true_to_mean(true_anom: f64, e: f64) -> f64 {
    let ecc_anom = 2.0
        * ((1.0 - e).sqrt() * (true_anom / 2.0).sin())
            .atan2((1.0 + e).sqrt() * (true_anom / 2.0).cos());
    ecc_anom - e * ecc_anom.sin()
}

fn ecc_to_true(ecc_anom: f64, e: f64) -> f64 {
    2.0 * ((1.0 + e).sqrt() * (ecc_anom / 2.0).sin())
        .atan2((1.0 - e).sqrt() * (ecc_anom / 2.0).cos())
}

/// Perifocal to inertial, all angles in radians.
fn state_from_angles(
    a: f64,
    e: f64,
    inc: f64,
    raan: f64,
    argp: f64,
    true_anom: f64,
) -> (Vec3, Vec3) {
    let p = a * (1.0 - e * e);
    let (sn, cn) = true_anom.sin_cos();
    let r = p / (1.0 + e * cn);
    let (px, py) = (r * cn, r * sn);
    let vf = (MU_EARTH / p).sqrt();
    let (vx, vy) = (-vf * sn, vf * (e + cn));

    let (so, co) = raan.sin_cos();
    let (sw, cw) = argp.sin_cos();
    let (si, ci) = inc.sin_cos();
    let col_p = Vec3::new(co * cw - so * sw * ci, so * cw + co * sw * ci, sw * si);
    let col_q = Vec3::new(-co * sw - so * cw * ci, -so * sw + co * cw * ci, cw * si);
    (col_p * px + col_q * py, col_p * vx + col_q * vy)
}

pub fn elements_to_state(elements: &OrbitalElements) -> Result<EciState> {
    elements.validate()?;
    let (position, velocity) = state_from_angles(
        elements.semimajor_axis_km,
        elements.eccentricity,
        elements.inclination_deg.to_radians(),
        elements.raan_deg.to_radians(),
        elements.arg_perigee_deg.to_radians(),
        elements.true_anomaly_deg.to_radians(),
    );
    Ok(EciState {
        position,
        velocity,
        epoch: elements.epoch,
    })
}

/// Reusable propagator with the per-orbit constants precomputed.
#[derive(Debug, Clone)]
pub struct Propagator {
    elements: OrbitalElements,
    model: ForceModel,
    mean_anomaly0: f64,
    mean_rate: f64,
    raan_rate: f64,
    argp_rate: f64,
}

impl Propagator {
    pub fn new(elements: OrbitalElements, model: ForceModel) -> Result<Self> {
        elements.validate()?;
        let e = elements.eccentricity;
        let n = elements.mean_motion();
        let (raan_rate, argp_rate, mean_corr) = match model {
            ForceModel::TwoBody => (0.0, 0.0, 0.0),
            ForceModel::J2Secular => secular_rates_rad_s(
                elements.semimajor_axis_km,
                e,
                elements.inclination_deg.to_radians(),
            ),
        };
        Ok(Propagator {
            mean_anomaly0: true_to_mean(elements.true_anomaly_deg.to_radians(), e),
            mean_rate: n + mean_corr,
            raan_rate,
            argp_rate,
            elements,
            model,
        })
    }

    pub fn elements(&self) -> &OrbitalElements {
        &self.elements
    }

    pub fn model(&self) -> ForceModel {
        self.model
    }

    /// Right ascension of the ascending node after `t_offset_s`, degrees in [0, 360).
    pub fn raan_at(&self, t_offset_s: f64) -> f64 {
        (self.elements.raan_deg + (self.raan_rate * t_offset_s).to_degrees()).rem_euclid(360.0)
    }

    /// State `t_offset_s` seconds after the element epoch.
    pub fn state_at(&self, t_offset_s: f64) -> Result<EciState> {
        let el = &self.elements;
        let e = el.eccentricity;
        let mean_anom = self.mean_anomaly0 + self.mean_rate * t_offset_s;
        let ecc_anom = solve_kepler(mean_anom, e)?;
        let true_anom = ecc_to_true(ecc_anom, e);
        let raan = el.raan_deg.to_radians() + self.raan_rate * t_offset_s;
        let argp = el.arg_perigee_deg.to_radians() + self.argp_rate * t_offset_s;
        let (position, velocity) = state_from_angles(
            el.semimajor_axis_km,
            e,
            el.inclination_deg.to_radians(),
            raan,
            argp,
            true_anom,
        );
        Ok(EciState {
            position,
            velocity,
            epoch: el.epoch.plus_seconds(t_offset_s),
        })
    }
}

/// J2-secular propagation of `elements` by `t_offset_s` seconds.
pub fn propagate(elements: &OrbitalElements, t_offset_s: f64) -> Result<EciState> {
    Propagator::new(*elements, ForceModel::J2Secular)?.state_at(t_offset_s)
}

/// Inclination of a circular orbit whose node precesses at the sun-synchronous rate.
pub fn sso_inclination(altitude_km: f64) -> Result<f64> {
    if !(200.0..=2000.0).contains(&altitude_km) {
        return Err(Error::NoSsoSolution { altitude_km });
    }
    let a = EARTH_RADIUS_KM + altitude_km;
    let n = (MU_EARTH / a.powi(3)).sqrt();
    let target = SSO_RAAN_RATE_DEG_PER_DAY.to_radians() / SECONDS_PER_DAY;
    let cos_i = -target / (1.5 * n * J2 * (EARTH_RADIUS_KM / a).powi(2));
    if !(-1.0..=1.0).contains(&cos_i) {
        return Err(Error::NoSsoSolution { altitude_km });
    }
    let inc = cos_i.acos().to_degrees();
    if !(90.0..=110.0).contains(&inc) {
        return Err(Error::NoSsoSolution { altitude_km });
    }
    Ok(inc)
}
