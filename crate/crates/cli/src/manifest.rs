//! Report envelope: every JSON report embeds the manifest that reproduces
//! it. Re-running the same command on the same inputs yields a byte-identical
//! report apart from the recorded wall time.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub tool_version: String,
    pub inputs: Vec<InputDigest>,
    /// Command-specific knobs, recorded verbatim.
    pub params: serde_json::Value,
    /// Worker-thread cap from COARSE_THREADS; analyses currently run on one
    /// thread, which trivially honors any cap.
    pub threads_cap: Option<usize>,
    pub wall_time_ms: u128,
}

#[derive(Serialize)]
pub struct Report<P: Serialize> {
    pub manifest: RunManifest,
    pub payload: P,
}

pub fn digest_bytes(path: &Path, bytes: &[u8]) -> InputDigest {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    InputDigest {
        path: path.display().to_string(),
        sha256: format!("{:x}", hasher.finalize()),
    }
}

pub fn threads_cap() -> Option<usize> {
    std::env::var("COARSE_THREADS").ok()?.parse().ok()
}

/// Writes text to a file atomically (temp file in the same directory, then
/// rename), or to stdout when no path is given.
pub fn write_output(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
            let mut tmp = match dir {
                Some(d) => d.to_path_buf(),
                None => PathBuf::from("."),
            };
            tmp.push(format!(
                ".{}.tmp-{}",
                path.file_name()
                    .map(|f| f.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "out".to_string()),
                std::process::id()
            ));
            {
                let mut file = std::fs::File::create(&tmp)
                    .with_context(|| format!("creating {}", tmp.display()))?;
                file.write_all(text.as_bytes())?;
                file.sync_all()?;
            }
            std::fs::rename(&tmp, path)
                .with_context(|| format!("renaming into {}", path.display()))?;
            Ok(())
        }
    }
}

pub fn render_report<P: Serialize>(report: &Report<P>) -> String {
    let mut text =
        serde_json::to_string_pretty(report).expect("reports always serialize");
    text.push('\n');
    text
}
