//! Sweeps, tabular output and configuration for protected-gate experiments.

pub mod angle;
pub mod config;
pub mod error;
pub mod output;
pub mod sweep;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
pub use sweep::{sweep, SweepRow};
