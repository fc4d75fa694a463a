//! Scenario runner for the coarse-graining library: config parsing, figure
//! presets, CSV trajectories and reports.

pub mod check;
pub mod compare;
pub mod config;
pub mod error;
pub mod models;
pub mod presets;
pub mod run;

pub use config::{parse_config, InitialState, Method, ModelKind, ModelParams, Scenario, TimeGrid};
pub use error::{CliError, Result};
pub use presets::Preset;
pub use run::{run_scenario, RunOptions, RunReport, Trajectory};

/// Process exit status of a validation failure.
pub const EXIT_VALIDATION: u8 = 1;
/// Process exit status when at least one method failed numerically.
pub const EXIT_NUMERICAL: u8 = 2;
