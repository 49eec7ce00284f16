//! Experiment harness for two-stage seeding: declarative configs, result
//! tables, scaling runs and SVG charts rendered from the result tables.

pub mod config;
pub mod error;
pub mod experiment;
pub mod solution;
pub mod svg;

pub use config::ExperimentConfig;
pub use error::{BenchError, Result};
pub use experiment::{run_experiment, run_scaling, ResultRow, TimingRow};
pub use solution::SolutionRecord;
