//! Command-line front end for the `kgcavity` scenarios.

pub mod args;
pub mod config;
pub mod run;

pub use config::{ConfigError, RunConfig};
pub use run::{run, RunError, RunOutput};
