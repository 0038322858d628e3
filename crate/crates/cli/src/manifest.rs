use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use nestbench_core::{PromptMethod, TaskKind};
use serde::{Deserialize, Serialize};

use crate::error::usage;
use crate::io::write_atomic;

pub const MANIFEST_FILE: &str = "manifest.json";

/// What a run directory holds and how it was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub task: TaskKind,
    pub method: PromptMethod,
    pub model: String,
    pub provider: String,
    pub dataset: PathBuf,
    pub dataset_sha256: String,
    pub seed: u64,
    pub records: usize,
    pub samples_per_record: u32,
    pub config_hash: String,
    pub cache_dir: Option<PathBuf>,
    pub created_at: String,
    pub updated_at: String,
    pub completed: bool,
    pub tool_version: String,
}

impl RunManifest {
    pub fn load(dir: &Path) -> anyhow::Result<Option<Self>> {
        let path = dir.join(MANIFEST_FILE);
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let m = serde_json::from_str(&text).map_err(|e| usage(format!("corrupt manifest {}: {e}", path.display())))?;
        Ok(Some(m))
    }

    pub fn save(&self, dir: &Path) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        write_atomic(&dir.join(MANIFEST_FILE), text.as_bytes())
    }

    /// Whether `other` describes the same work; timestamps and progress are ignored.
    pub fn same_run(&self, other: &RunManifest) -> bool {
        self.task == other.task
            && self.method == other.method
            && self.model == other.model
            && self.provider == other.provider
            && self.dataset_sha256 == other.dataset_sha256
            && self.samples_per_record == other.samples_per_record
            && self.config_hash == other.config_hash
    }
}
