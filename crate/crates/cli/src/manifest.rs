//! Run manifests: the resolved configuration, tool version, wall time, and a
//! SHA-256 digest of every artifact the run produced.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;
use sha2::{Digest, Sha256};

use crate::CliError;

pub fn sha256_hex(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Io(format!("cannot hash {}: {e}", path.display())))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

pub fn write_manifest(
    out_dir: &Path,
    command: &str,
    config: serde_json::Value,
    outputs: &[PathBuf],
    started: Instant,
) -> Result<PathBuf, CliError> {
    let mut entries = Vec::new();
    for file in outputs {
        let bytes = std::fs::metadata(file)
            .map_err(|e| CliError::Io(format!("{}: {e}", file.display())))?
            .len();
        entries.push(json!({
            "file": file.display().to_string(),
            "sha256": sha256_hex(file)?,
            "bytes": bytes,
        }));
    }
    let manifest = json!({
        "version": klpath_core::report::VERSION,
        "command": command,
        "config": config,
        "wall_time_seconds": started.elapsed().as_secs_f64(),
        "outputs": entries,
    });
    let path = out_dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serialization");
    text.push('\n');
    std::fs::write(&path, text)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}
