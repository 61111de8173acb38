//! Experiment runner for the encoding comparison: single runs, the
//! (encoding × scenario) grid, training plots and MNIST download.

pub mod config;
pub mod error;
pub mod fetch;
pub mod grid;
pub mod plot;
pub mod runner;

pub use config::{ExperimentConfig, Scenario};
pub use error::{RunError, RunResult};
pub use grid::{run_grid, GridSummary};
pub use plot::emit_plots;
pub use runner::{run_experiment, RunReport};
