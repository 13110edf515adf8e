use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// One per run, written next to the primary output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    /// sha256 over the inputs, each framed as a git blob (`blob <len>\0<bytes>`).
    pub input_hash: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub exit_code: i32,
    pub wall_clock_seconds: f64,
}

pub fn content_hash(inputs: &[(String, Vec<u8>)]) -> String {
    let mut h = Sha256::new();
    for (_, bytes) in inputs {
        h.update(format!("blob {}\0", bytes.len()).as_bytes());
        h.update(bytes);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn write(out: &Path, m: &RunManifest) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(m).expect("manifest serializes");
    fs::write(manifest_path(out), text + "\n")
}
