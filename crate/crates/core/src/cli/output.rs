//! CSV rendering, atomic writes and the on-disk result cache.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::config::RunConfig;
use crate::error::Result;

/// Header block written above every CSV table.
pub fn header(command: &str, cfg: &RunConfig, tolerances: &str) -> String {
    let mut s = format!("# dirac-spectra {}\n# command = {command}\n", env!("CARGO_PKG_VERSION"));
    for (k, v) in cfg.stable_entries() {
        let _ = writeln!(s, "# {k} = {v}");
    }
    let _ = writeln!(s, "# tolerances: {tolerances}");
    s
}

pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv(header: &str, columns: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = header.to_string();
    s.push_str(&columns.join(","));
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| real(x)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Write via a temporary file in the target directory followed by a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".zeros.json");
    PathBuf::from(s)
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn disabled() -> Self {
        Self { dir: None }
    }

    /// `explicit`, else `$DIRAC_SPECTRA_CACHE`, else `~/.cache/dirac-spectra`.
    pub fn locate(explicit: Option<PathBuf>) -> Self {
        let dir = explicit
            .or_else(|| std::env::var_os("DIRAC_SPECTRA_CACHE").map(PathBuf::from))
            .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache/dirac-spectra")));
        Self { dir }
    }

    pub fn key(command: &str, cfg: &RunConfig) -> String {
        let mut h = Sha256::new();
        h.update(env!("CARGO_PKG_VERSION").as_bytes());
        h.update(b"\0");
        h.update(command.as_bytes());
        for (k, v) in cfg.stable_entries() {
            h.update(b"\0");
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
        }
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str, suffix: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}{suffix}")))
    }

    pub fn get(&self, key: &str, suffix: &str) -> Option<Vec<u8>> {
        let bytes = std::fs::read(self.path(key, suffix)?).ok()?;
        log::info!("cache hit {key}{suffix}");
        Some(bytes)
    }

    /// Failures to store are logged and otherwise ignored.
    pub fn put(&self, key: &str, suffix: &str, bytes: &[u8]) {
        if let Some(p) = self.path(key, suffix) {
            if let Err(e) = write_atomic(&p, bytes) {
                log::warn!("could not write cache entry {}: {e}", p.display());
            }
        }
    }
}
