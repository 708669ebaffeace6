//! Experiment layer over `aqcsim`: file formats, run configuration, runtime
//! searches, sweeps and reports.

pub mod config;
pub mod error;
pub mod experiments;
pub mod formats;
pub mod problem;
pub mod stats;

pub use config::RunConfig;
pub use error::{LabError, Result};
