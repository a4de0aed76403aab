//! Configuration, experiment orchestration and parallel sweeps for the
//! contact-wave laboratory.

pub mod config;
pub mod error;
pub mod experiments;
pub mod summary;
pub mod sweep;

pub use config::{load_config, parse_config, ExperimentConfig, ExperimentKind};
pub use error::{HarnessError, Result};
pub use experiments::run_experiment;
pub use summary::{Check, Status, Summary};
pub use sweep::sweep_parallel;
