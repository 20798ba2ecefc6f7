//! On-disk cache of expanded Δ_k tables keyed by (k, N), with a SHA-256
//! sidecar per file. A cached table with a larger N is truncated on reuse.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use bkd_core::{delta_table, PartitionTable};
use sha2::{Digest, Sha256};

pub struct TableCache {
    dir: Option<PathBuf>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn default_dir() -> PathBuf {
    if let Some(d) = std::env::var_os("BKD_CACHE_DIR") {
        return PathBuf::from(d);
    }
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
        return PathBuf::from(d).join("bkd");
    }
    if let Some(h) = std::env::var_os("HOME") {
        return PathBuf::from(h).join(".cache").join("bkd");
    }
    std::env::temp_dir().join("bkd-cache")
}

fn file_name(k: u32, n: usize) -> String {
    format!("delta-k{k}-n{n}.json")
}

fn parse_name(name: &str, k: u32) -> Option<usize> {
    let rest = name.strip_prefix(&format!("delta-k{k}-n"))?;
    rest.strip_suffix(".json")?.parse().ok()
}

impl TableCache {
    pub fn new(enabled: bool) -> TableCache {
        TableCache { dir: enabled.then(default_dir) }
    }

    #[cfg(test)]
    pub fn at(dir: &Path) -> TableCache {
        TableCache { dir: Some(dir.to_path_buf()) }
    }

    /// Δ_k(0..=n), from the cache when a valid entry with N ≥ n exists.
    pub fn table(&self, k: u32, n: usize) -> Result<PartitionTable> {
        if let Some(dir) = &self.dir {
            if let Some(t) = self.lookup(dir, k, n) {
                return Ok(t);
            }
        }
        let t = delta_table(k, n).with_context(|| format!("expanding Δ_{k} to N = {n}"))?;
        if let Some(dir) = &self.dir {
            if let Err(e) = store(dir, &t) {
                eprintln!("warning: could not cache table: {e:#}");
            }
        }
        Ok(t)
    }

    fn lookup(&self, dir: &Path, k: u32, n: usize) -> Option<PartitionTable> {
        let mut sizes: Vec<usize> = fs::read_dir(dir)
            .ok()?
            .filter_map(|e| e.ok())
            .filter_map(|e| parse_name(e.file_name().to_str()?, k))
            .filter(|&m| m >= n)
            .collect();
        sizes.sort_unstable();
        sizes.into_iter().find_map(|m| load(dir, k, m).map(|t| t.truncated(n)))
    }
}

fn load(dir: &Path, k: u32, m: usize) -> Option<PartitionTable> {
    let path = dir.join(file_name(k, m));
    let body = fs::read(&path).ok()?;
    let recorded = fs::read_to_string(path.with_extension("json.sha256")).ok()?;
    if recorded.trim() != sha256_hex(&body) {
        eprintln!("warning: integrity check failed for {}, ignoring it", path.display());
        return None;
    }
    let t = PartitionTable::from_json(std::str::from_utf8(&body).ok()?).ok()?;
    (t.k() == k && t.n_max() == m).then_some(t)
}

fn store(dir: &Path, t: &PartitionTable) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(file_name(t.k(), t.n_max()));
    let body = t.to_json();
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, &body)?;
    fs::write(path.with_extension("json.sha256"), sha256_hex(body.as_bytes()))?;
    fs::rename(&tmp, &path)?;
    Ok(())
}
