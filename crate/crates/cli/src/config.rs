use std::fs;
use std::path::Path;

use anyhow::Context;
use nestbench_core::generator::ExemplarSource;
use nestbench_core::prompt::PromptOptions;
use nestbench_gateway::GatewayConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::usage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ExemplarMode {
    #[default]
    Fixture,
    Generated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PromptSettings {
    pub exemplars: ExemplarMode,
    pub temperature: f64,
    pub sampling_temperature: f64,
    pub self_consistency_samples: u32,
}

impl Default for PromptSettings {
    fn default() -> Self {
        let d = PromptOptions::default();
        PromptSettings {
            exemplars: ExemplarMode::Fixture,
            temperature: d.greedy_temperature,
            sampling_temperature: d.sampling_temperature,
            self_consistency_samples: d.self_consistency_samples,
        }
    }
}

impl PromptSettings {
    pub fn options(&self) -> PromptOptions {
        PromptOptions {
            exemplars: match self.exemplars {
                ExemplarMode::Fixture => ExemplarSource::Fixture,
                ExemplarMode::Generated => ExemplarSource::Generated,
            },
            self_consistency_samples: self.self_consistency_samples,
            greedy_temperature: self.temperature,
            sampling_temperature: self.sampling_temperature,
        }
    }
}

/// Contents of the `--config` TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub gateway: GatewayConfig,
    pub prompt: PromptSettings,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = toml::from_str(&text).map_err(|e| usage(format!("invalid config {}: {e}", path.display())))?;
        if cfg.prompt.self_consistency_samples == 0 {
            return Err(usage("prompt.self_consistency_samples must be at least 1"));
        }
        if cfg.prompt.temperature < 0.0 || cfg.prompt.sampling_temperature < 0.0 {
            return Err(usage("temperatures must be non-negative"));
        }
        Ok(cfg)
    }

    /// Hash of the parsed settings, independent of file formatting.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(serde_json::to_vec(self).expect("config serializes")))
    }
}
