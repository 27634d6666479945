use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

/// Writes `path` through a temporary file in the same directory, renamed into
/// place only once `fill` has succeeded.
pub fn write_atomic<F>(path: &Path, fill: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<NamedTempFile>) -> Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp =
        NamedTempFile::new_in(dir).with_context(|| format!("cannot create temporary file in {}", dir.display()))?;
    let mut w = BufWriter::new(tmp);
    fill(&mut w)?;
    let tmp = w.into_inner().map_err(|e| e.into_error())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// `<out>.<suffix>` for companion files.
pub fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".");
    name.push(suffix);
    PathBuf::from(name)
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

fn unix_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis())
}

/// Everything needed to rerun a command and check its inputs, written next
/// to its primary output as `<out>.manifest.json`.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command_line: Vec<String>,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
    pub threshold: Option<f64>,
    pub index_fingerprint: Option<String>,
    pub terms_hash: Option<String>,
    /// Input path to SHA-256 of its bytes (directories are listed without a
    /// hash; the index fingerprint covers their content).
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub summary: BTreeMap<String, serde_json::Value>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

impl RunManifest {
    pub fn start(command_line: Vec<String>, jobs: Option<usize>) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command_line,
            jobs,
            seed: None,
            threshold: None,
            index_fingerprint: None,
            terms_hash: None,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            summary: BTreeMap::new(),
            started_unix_ms: unix_ms(),
            finished_unix_ms: 0,
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        let digest = if path.is_dir() {
            "directory".to_string()
        } else {
            sha256_file(path)?
        };
        self.inputs.insert(path.display().to_string(), digest);
        Ok(())
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn note(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn finish(mut self, out: &Path) -> Result<()> {
        self.finished_unix_ms = unix_ms();
        write_atomic(&sibling(out, "manifest.json"), |w| {
            serde_json::to_writer_pretty(&mut *w, &self)?;
            writeln!(w)?;
            Ok(())
        })
    }
}
