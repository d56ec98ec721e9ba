//! Config-driven experiment runner, reports and plots.

pub mod config;
pub mod experiments;
pub mod plot;
pub mod report;
pub mod suite;

pub use config::{Experiment, ExperimentConfig, Format, SCHEMA_VERSION};
pub use experiments::{efi_trials, run, run_and_write};
pub use plot::{emit_plot, render_svg};
pub use report::{strip_wall_time, Check, ExperimentReport, Record, Sweep, SweepPoint};
pub use suite::{run_suite, SuiteSummary, DEFAULT_SUITE_SEED};
