//! Batch driver for the turnpike laboratory: configuration files, run
//! manifests and the `solve`, `optimize`, `sweep` and `gamma-probe`
//! subcommands.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;

pub use commands::RunArgs;
pub use config::RunConfig;
pub use error::{CliError, CliResult};
