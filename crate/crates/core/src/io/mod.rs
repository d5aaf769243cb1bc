//! Configuration, result files and post-processing metrics.

mod checkerboard;
mod config;
mod history;
mod manifest;
mod pgm;

pub use checkerboard::checkerboard_score;
pub use config::{parse_config, parse_entries, Entry, OptimizerKind, RunConfig, KEYS};
pub use history::{history_csv, write_history_csv, HISTORY_HEADER};
pub use manifest::RunManifest;
pub use pgm::{density_pgm, write_density_pgm};

use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
