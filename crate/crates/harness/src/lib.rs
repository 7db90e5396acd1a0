//! Experiment orchestration for frame-theoretic convolutional gridding:
//! configuration, runners producing CSV tables, and baseline regression.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod regress;
pub mod table;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
