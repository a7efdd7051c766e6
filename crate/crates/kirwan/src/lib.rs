//! Scenario files, reports and the `kirwan` command line on top of `kirwan-core`.

pub mod cli;
pub mod config;
pub mod report;

pub use config::{load_scenario, parse_scenario, to_config, to_json, ConfigError, ScenarioConfig};
