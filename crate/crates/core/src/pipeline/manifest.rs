//! Machine-readable record of a batch run.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixer::LambdaSummary;
use crate::types::AugConfig;

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmitSet {
    pub hard: bool,
    pub soft: bool,
}

impl Default for EmitSet {
    fn default() -> Self {
        Self {
            hard: true,
            soft: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    HardImage,
    HardMask,
    SoftImage,
    SoftMaskChannel,
    SoftMaskSidecar,
    OverlayFirst,
    OverlaySecond,
    OverlayMixed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    pub kind: OutputKind,
    /// Relative to the output directory, `/`-separated.
    pub path: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStatus {
    Ok,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub pair_index: usize,
    pub first: String,
    pub second: String,
    pub status: PairStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<PairStats>,
    pub outputs: Vec<OutputFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairStats {
    pub l1: usize,
    pub l2: usize,
    pub labels_first: usize,
    pub labels_second: usize,
    pub labels_mixed: usize,
    pub num_selected: usize,
    pub hard_coverage: f64,
    pub lambda: LambdaSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub entries: usize,
    pub skipped_files: usize,
    pub num_classes: usize,
    pub channels: usize,
}

/// Contents of `manifest.json`. Holds nothing that varies between identical runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub seed: u64,
    pub config: AugConfig,
    pub emit: EmitSet,
    pub overlay: bool,
    pub dataset: DatasetSummary,
    pub failures: usize,
    pub records: Vec<PairRecord>,
}

impl Manifest {
    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn output_files(&self) -> impl Iterator<Item = &OutputFile> {
        self.records.iter().flat_map(|r| &r.outputs)
    }
}
