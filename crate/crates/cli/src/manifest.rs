use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use usable_speech::Error;

use crate::config::RunConfig;
use crate::run::{Invocation, Outcome};

/// Written next to the outputs of every run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    pub invocation: Invocation,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    #[serde(default)]
    pub results: Map<String, Value>,
    pub duration_secs: f64,
}

impl RunManifest {
    pub fn new(
        invocation: Invocation,
        config: RunConfig,
        outcome: Outcome,
        duration_secs: f64,
    ) -> Self {
        RunManifest {
            command: invocation.name().to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            invocation,
            inputs: outcome.inputs,
            outputs: outcome.outputs,
            results: outcome.results,
            duration_secs,
        }
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(self)? + "\n";
        std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}
