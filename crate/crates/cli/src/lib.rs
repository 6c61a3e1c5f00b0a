//! Experiment runner for the `ehrelay` command: sweeps over SNR and
//! energy-exhausted probability, diversity fits, and their CSV/SVG output.

pub mod app;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;
pub mod sweep;

pub use config::{Mode, SweepSpec};
pub use error::{CliError, Result};
pub use sweep::{SweepResult, SweepRow};
