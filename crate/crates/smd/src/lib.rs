//! Files, configuration and commands on top of `smd-core`.

pub mod commands;
pub mod config;
pub mod design_io;
pub mod error;

pub use config::{load_config, parse_config, RunConfig};
pub use error::{CliError, Result};
