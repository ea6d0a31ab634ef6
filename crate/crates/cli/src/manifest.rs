use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

/// Provenance record written to every run directory. Passing it back as
/// `--config` reproduces the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub restart_seeds: Vec<u64>,
    pub config: RunConfig,
}

impl Manifest {
    pub fn new(command: &str, seed: u64, restart_seeds: Vec<u64>, config: &RunConfig) -> Self {
        let mut config = config.clone();
        config.seed = Some(seed);
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            restart_seeds,
            config,
        }
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        let path = dir.join("manifest.json");
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(&path, format!("{json}\n"))
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
    }
}
