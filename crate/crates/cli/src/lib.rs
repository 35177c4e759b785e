//! Config-driven front end for the planar friction toolkit.

pub mod commands;
pub mod config;
pub mod error;

pub use config::RunConfig;
pub use error::CliError;

/// Environment variable capping the worker threads used by parallel pre-computation.
pub const THREADS_ENV: &str = "PLANAR_FRICTION_THREADS";
