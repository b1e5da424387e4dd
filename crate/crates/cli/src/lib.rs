//! Experiment harness around the `kurasync` core: configuration files,
//! seeded instance generation, run/sweep orchestration, and CSV/report
//! emission.

pub mod config;
pub mod error;
pub mod generate;
pub mod report;
pub mod runner;
pub mod scenario;
pub mod sweep;

pub use config::{parse_config, ExperimentConfig};
pub use error::HarnessError;
pub use report::SummaryReport;
pub use runner::{certify_only, run, RunOutcome};
pub use sweep::{sweep, Axis};
