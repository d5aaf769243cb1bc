use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Record of one `run`: resolved config, outcome and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub case: String,
    pub config: BTreeMap<String, String>,
    pub version: String,
    pub duration_seconds: f64,
    pub final_objective: f64,
    pub final_volume_fraction: f64,
    pub iterations: usize,
    /// `None` when the mesh has no 2x2 block.
    pub checkerboard_score: Option<f64>,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config {
            line: e.line(),
            message: format!("invalid manifest: {e}"),
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        super::write_text(path, &self.to_json())
    }
}
