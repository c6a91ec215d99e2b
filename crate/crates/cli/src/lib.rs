//! Experiment configuration, orchestration, and result emission for the
//! shaping-over-fiber laboratory.

pub mod config;
pub mod csvio;
pub mod error;
pub mod sweep;

pub use config::{ExperimentConfig, ShapingTarget, SourceKind};
pub use error::{CliError, Result};
pub use sweep::{run_point, run_sweep_n, run_sweep_power, PowerRow, SweepResult, SweepRow};
