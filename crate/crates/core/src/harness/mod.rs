//! Scenario runner: property checks over sampled points, the theta-span
//! closure fit, and structured reports.

pub mod checks;
pub mod closure;
pub mod config;
pub mod report;
pub mod sampling;

pub use checks::{run_suite, run_suite_with, RunOptions, YBuilder};
pub use config::{Mode, ScenarioConfig, CHECK_NAMES};
pub use report::{emit_report, validate_report, CheckReport, Format, Report, Status};
