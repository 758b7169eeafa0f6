//! Run manifests: one per solve, written next to the front file, recording
//! everything needed to reproduce the artifact plus wall-clock timing and
//! solver effort.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub instance_hash: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub wall_clock_seconds: f64,
    pub solver_stats: serde_json::Value,
    pub artifacts: Vec<String>,
    pub created_unix: u64,
}

impl RunManifest {
    pub fn write_next_to(&self, artifact: &Path) -> std::io::Result<PathBuf> {
        let path = manifest_path(artifact);
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

pub fn manifest_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    artifact.with_file_name(name)
}

pub fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
