use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::{Error, Result};

/// Writes files into one directory, each through a temporary file that is
/// renamed into place, and records what was written.
pub struct OutputDir {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)
            .map_err(|e| Error::invalid(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(OutputDir { dir, written: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn write_with(&mut self, name: &str, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<PathBuf> {
        let target = self.path(name);
        if let Some(parent) = target.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let mut tmp = NamedTempFile::new_in(target.parent().unwrap_or(Path::new(".")))?;
        {
            let mut w = std::io::BufWriter::new(tmp.as_file_mut());
            f(&mut w)?;
            w.flush()?;
        }
        tmp.as_file().sync_all()?;
        tmp.persist(&target).map_err(|e| Error::Io(e.error))?;
        self.written.push(target.clone());
        Ok(target)
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        self.write_with(name, |w| Ok(w.write_all(bytes)?))
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    /// Timestamped sidecar listing the files written so far; kept apart so that
    /// the artifacts themselves are reproducible byte for byte.
    pub fn write_sidecar(&mut self, command: &str, config_hash: Option<&str>) -> Result<PathBuf> {
        #[derive(Serialize)]
        struct Sidecar<'a> {
            command: &'a str,
            version: &'a str,
            created_unix: f64,
            config_hash: Option<&'a str>,
            files: Vec<String>,
        }
        let created_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0);
        let files = self
            .written
            .iter()
            .map(|p| p.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned()))
            .collect();
        let sidecar = Sidecar {
            command,
            version: env!("CARGO_PKG_VERSION"),
            created_unix,
            config_hash,
            files,
        };
        let text = serde_json::to_string_pretty(&sidecar)?;
        let target = self.path("run.meta.json");
        let mut tmp = NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(text.as_bytes())?;
        tmp.persist(&target).map_err(|e| Error::Io(e.error))?;
        Ok(target)
    }
}
