//! Experiment driver: config parsing, deterministic parallel sweeps and
//! atomic CSV/JSON artifacts.

pub mod config;
pub mod run;
pub mod selftest;

pub use config::{parse_config, parse_str, ConfigError, ConfigErrors, ExperimentConfig, Kind};
pub use run::{run, write_atomic, write_atomic_with, RunError, RunManifest, TaskRecord};
pub use selftest::{selftest, Check};
