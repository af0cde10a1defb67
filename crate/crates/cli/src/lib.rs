//! Scenario configuration, dispatch and reproducible file output for the
//! `ilab` command-line tool.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{Scenario, ScenarioConfig};
pub use error::{CliError, CliResult};
pub use output::{emit_heatmap, verify_manifest, Grid2Table, HeatmapScale, Manifest, Table};
pub use run::{run_scenario, RunReport};
