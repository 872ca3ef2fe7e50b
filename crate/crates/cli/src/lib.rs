//! Config-driven experiment runner built on `entangle_core`.
//!
//! A run reads one JSON config, executes the experiment kind it names and
//! writes `report.csv` plus `summary.md` to an output directory.

pub mod config;
pub mod experiments;
pub mod kinds;
pub mod output;

pub use config::{ConfigError, ExperimentConfig};
pub use experiments::{run_experiment, Check, Outcome};
pub use kinds::{Kind, KINDS};
