//! Experiment pipelines, report files and command-line front end for
//! `hedmd-core`.
//!
//! A JSON [`ExperimentConfig`] selects the system, the sampling pattern
//! and the dictionary. [`experiments::run`] simulates the ensemble,
//! reconstructs unmeasured components, fits each model and scores it on
//! held-out trajectories; [`report::emit_report`] writes the result.

pub mod compare;
pub mod config;
pub mod ensemble_io;
pub mod error;
pub mod experiments;
pub mod report;

pub use config::{ExperimentConfig, Method, Mode};
pub use error::{Error, Result};
pub use report::{emit_report, ExperimentReport};
