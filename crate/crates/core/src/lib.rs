//! Cross-calibration opportunity planning for Earth-observing satellites.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`propagator`]: two-body orbits with J2 secular drift.
//! 2. [`sensing`]: pointing modes, access tests, and solar/view geometry.
//! 3. [`catalog`] + [`access`]: calibration sites gridded into 200 points each,
//!    swept over the scenario window to produce access events.
//! 4. [`planner`]: reference/test event pairing (vicarious), ground-track
//!    crossover detection (top of atmosphere), and cumulative count curves.
//! 5. [`scenario`]: presets, constellation architectures, configuration, and
//!    file outputs.
//!
//! Every stage is a pure function of its inputs. Parallel evaluation is merged
//! into a canonical order, so results never depend on the thread count.

pub mod access;
pub mod astro;
pub mod catalog;
pub mod constants;
mod error;
pub mod planner;
pub mod propagator;
pub mod scenario;
pub mod sensing;

pub use error::{Error, Result};

/// Three-vector of `f64`, km or km/s depending on context.
pub type Vec3 = nalgebra::Vector3<f64>;
