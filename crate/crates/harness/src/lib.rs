//! Monte Carlo experiment runner for the `pilotguard-core` detector and
//! beamformers.
//!
//! An [`ExperimentSpec`] (usually parsed from a small `key = value` config
//! with [`parse_spec`]) names an experiment kind, a base scenario and one
//! swept parameter. [`run_experiment`] returns one [`ResultRow`] per metric
//! and sweep point, with closed-form companions where they exist, and
//! [`write_csv`] renders them.

// `!(x >= 0.0)` style checks are how NaN gets rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
mod error;
pub mod report;
pub mod runner;

pub use config::{parse_spec, parse_spec_for, ExperimentKind, ExperimentSpec, Pipeline, Sweep, SweepParam};
pub use error::{HarnessError, Result};
pub use report::{to_csv_string, write_csv, write_csv_file, ResultRow};
pub use runner::{run_experiment, run_experiment_with, substream_id, Execution};
