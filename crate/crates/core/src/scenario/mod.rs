//! Scenario assembly: presets, transfer-radiometer architectures, TOML
//! configuration, and the end-to-end run that writes plot-ready tables.

mod config;
mod presets;
mod report;
mod run;

pub use config::{
    CriteriaConfig, CriteriaVariant, InlineSite, OutputConfig, ReferenceConfig, RunMode,
    SatelliteConfig, ScenarioConfig, SitesConfig, TestConfig, WindowConfig, BUILTIN_CATALOG,
};
pub use presets::{
    architecture_satellites, build_architecture, flagship_presets, plane_raans, preset_by_name,
    raan_for_ltdn, smallsat_sensor, testsat_presets, Architecture, TestSatOptions, ARCHITECTURES,
    DEFAULT_TRAILING_DEG, FLAGSHIP_ALONG_TRACK_FOV_DEG, ISS_ALTITUDE_KM, ISS_INCLINATION_DEG,
    SMALLSAT_FOR_HALF_ANGLE_DEG, SMALLSAT_FOV_DEG, TR_ALTITUDE_KM, TR_INCLINATION_DEG,
};
pub use report::render_report;
pub use run::{
    evaluate_architectures, render_outputs, render_states, run_config, run_scenario,
    run_with_events, scenario_accesses, write_outputs, ScenarioResults, STATES_HEADER,
};
