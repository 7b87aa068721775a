//! Append-only result cache keyed by (group, set content hash, operation,
//! parameters).

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::phi::{phi_exact_with, SolverOptions};
use crate::set::ElemSet;

pub const CACHE_SCHEMA: &str = "sumavoid.cache/1";
pub const CACHE_FILE: &str = "results.jsonl";
/// Overrides any cache directory given on the command line or in a config.
pub const CACHE_ENV: &str = "SUMAVOID_CACHE";
/// One hit in this many is recomputed and compared.
pub const SPOT_CHECK_EVERY: u64 = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacheEntry {
    pub schema: String,
    pub group: Vec<u32>,
    pub hash: String,
    pub op: String,
    pub params: String,
    pub value: Value,
}

impl CacheEntry {
    fn key(&self) -> String {
        key(&self.group, &self.hash, &self.op, &self.params)
    }
}

fn key(group: &[u32], hash: &str, op: &str, params: &str) -> String {
    format!("{group:?}|{hash}|{op}|{params}")
}

pub fn parse_cache_line(line: &str) -> Result<CacheEntry> {
    let e: CacheEntry = serde_json::from_str(line).map_err(|e| Error::parse(e.to_string()))?;
    if e.schema != CACHE_SCHEMA {
        return Err(Error::parse(format!("unknown cache schema {:?}", e.schema)));
    }
    if e.hash.len() != 64 || !e.hash.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(Error::parse("cache hash must be 64 hex digits"));
    }
    Ok(e)
}

/// Resolution order: `SUMAVOID_CACHE`, then the explicit directory.
pub fn resolve_cache_dir(explicit: Option<&Path>) -> Option<PathBuf> {
    match std::env::var_os(CACHE_ENV) {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => explicit.map(Path::to_path_buf),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub loaded: u64,
    pub skipped_lines: u64,
    pub hits: u64,
    pub misses: u64,
    pub spot_checks: u64,
}

pub struct PhiCache {
    path: PathBuf,
    entries: Mutex<HashMap<String, Value>>,
    file: Mutex<File>,
    loaded: u64,
    skipped: u64,
    hits: AtomicU64,
    misses: AtomicU64,
    spot_checks: AtomicU64,
}

impl PhiCache {
    /// Opens (creating if needed) `dir/results.jsonl`. Unreadable lines are
    /// skipped and counted; later entries for a key win.
    pub fn open(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(CACHE_FILE);
        let mut entries = HashMap::new();
        let (mut loaded, mut skipped) = (0, 0);
        if path.exists() {
            for line in BufReader::new(File::open(&path)?).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                match parse_cache_line(&line) {
                    Ok(e) => {
                        entries.insert(e.key(), e.value);
                        loaded += 1;
                    }
                    Err(_) => skipped += 1,
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(PhiCache {
            path,
            entries: Mutex::new(entries),
            file: Mutex::new(file),
            loaded,
            skipped,
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            spot_checks: AtomicU64::new(0),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            loaded: self.loaded,
            skipped_lines: self.skipped,
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            spot_checks: self.spot_checks.load(Ordering::Relaxed),
        }
    }

    pub fn get(&self, set: &ElemSet, op: &str, params: &str) -> Option<Value> {
        let k = key(set.group().factors(), &set.content_hash(), op, params);
        let v = self.entries.lock().expect("cache lock").get(&k).cloned();
        let counter = if v.is_some() { &self.hits } else { &self.misses };
        counter.fetch_add(1, Ordering::Relaxed);
        v
    }

    pub fn put(&self, set: &ElemSet, op: &str, params: &str, value: Value) -> Result<()> {
        let entry = CacheEntry {
            schema: CACHE_SCHEMA.to_string(),
            group: set.group().factors().to_vec(),
            hash: set.content_hash(),
            op: op.to_string(),
            params: params.to_string(),
            value,
        };
        let line = serde_json::to_string(&entry)?;
        {
            let mut f = self.file.lock().expect("cache lock");
            writeln!(f, "{line}")?;
        }
        self.entries.lock().expect("cache lock").insert(entry.key(), entry.value);
        Ok(())
    }

    /// φ(A) through the cache. Every hundredth hit is recomputed and a
    /// disagreement is reported as a failed claim.
    pub fn phi(&self, set: &ElemSet, opts: &SolverOptions) -> Result<usize> {
        if let Some(v) = self.get(set, "phi", "") {
            let cached = v.as_u64().ok_or_else(|| Error::parse("cached phi is not an integer"))? as usize;
            if self.hits.load(Ordering::Relaxed) % SPOT_CHECK_EVERY == 1 {
                self.spot_checks.fetch_add(1, Ordering::Relaxed);
                let fresh = phi_exact_with(set, opts)?.phi;
                if fresh != cached {
                    return Err(Error::Claim(format!(
                        "cache entry for {set:?} says phi = {cached}, recomputation gives {fresh}"
                    )));
                }
            }
            return Ok(cached);
        }
        let phi = phi_exact_with(set, opts)?.phi;
        self.put(set, "phi", "", Value::from(phi))?;
        Ok(phi)
    }
}

/// φ(A), through `cache` when one is configured.
pub fn phi_cached(cache: Option<&PhiCache>, set: &ElemSet, opts: &SolverOptions) -> Result<usize> {
    match cache {
        Some(c) => c.phi(set, opts),
        None => Ok(phi_exact_with(set, opts)?.phi),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;

    #[test]
    fn persists_and_reloads() {
        let dir = tempfile::tempdir().unwrap();
        let g = GroupSpec::cyclic(16).unwrap();
        let a = ElemSet::from_indices(&g, [1, 2, 4, 5, 9, 10, 13]).unwrap();
        let opts = SolverOptions::default();
        {
            let c = PhiCache::open(dir.path()).unwrap();
            assert_eq!(c.phi(&a, &opts).unwrap(), 4);
            assert_eq!(c.stats().misses, 1);
        }
        let c = PhiCache::open(dir.path()).unwrap();
        assert_eq!(c.stats().loaded, 1);
        assert_eq!(c.phi(&a, &opts).unwrap(), 4);
        let s = c.stats();
        assert_eq!((s.hits, s.spot_checks), (1, 1));
    }

    #[test]
    fn poisoned_entry_is_caught_by_spot_check() {
        let dir = tempfile::tempdir().unwrap();
        let g = GroupSpec::cyclic(7).unwrap();
        let a = ElemSet::full(&g);
        let c = PhiCache::open(dir.path()).unwrap();
        c.put(&a, "phi", "", Value::from(3)).unwrap();
        assert!(matches!(c.phi(&a, &SolverOptions::default()), Err(Error::Claim(_))));
    }

    #[test]
    fn bad_lines_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join(CACHE_FILE), "not json\n{\"schema\":\"x\"}\n").unwrap();
        let c = PhiCache::open(dir.path()).unwrap();
        assert_eq!(c.stats().skipped_lines, 2);
        assert!(parse_cache_line("{}").is_err());
    }
}
