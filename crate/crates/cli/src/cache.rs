//! On-disk cache of reduced homology, keyed by instance digest.

use crate::report::TOOL_VERSION;
use anyhow::Result;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use wittlab_complex::homology::ReducedHomology;

pub const CACHE_ENV: &str = "WITTLAB_CACHE_DIR";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub tool_version: String,
    pub digest: String,
    pub up_to: usize,
    pub homology: ReducedHomology,
}

pub struct HomologyCache {
    dir: PathBuf,
}

impl HomologyCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        HomologyCache { dir: dir.into() }
    }

    /// The cache named by `WITTLAB_CACHE_DIR`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, digest: &str, up_to: usize) -> PathBuf {
        self.dir.join(format!("{digest}-h{up_to}.json"))
    }

    /// A stored entry for this digest and degree written by this version;
    /// unreadable or stale entries count as missing.
    pub fn get(&self, digest: &str, up_to: usize) -> Option<ReducedHomology> {
        let text = std::fs::read_to_string(self.path(digest, up_to)).ok()?;
        let e: CacheEntry = serde_json::from_str(&text).ok()?;
        (e.tool_version == TOOL_VERSION && e.digest == digest && e.up_to == up_to).then_some(e.homology)
    }

    pub fn put(&self, digest: &str, up_to: usize, h: &ReducedHomology) -> Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let e = CacheEntry {
            tool_version: TOOL_VERSION.to_string(),
            digest: digest.to_string(),
            up_to,
            homology: h.clone(),
        };
        let tmp = self.path(digest, up_to).with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_vec_pretty(&e)?)?;
        std::fs::rename(tmp, self.path(digest, up_to))?;
        Ok(())
    }

    pub fn invalidate(&self, digest: &str, up_to: usize) -> Result<()> {
        match std::fs::remove_file(self.path(digest, up_to)) {
            Err(e) if e.kind() != std::io::ErrorKind::NotFound => Err(e.into()),
            _ => Ok(()),
        }
    }

    pub fn get_or_compute<F>(&self, digest: &str, up_to: usize, f: F) -> Result<(ReducedHomology, bool)>
    where
        F: FnOnce() -> Result<ReducedHomology>,
    {
        if let Some(h) = self.get(digest, up_to) {
            return Ok((h, true));
        }
        let h = f()?;
        self.put(digest, up_to, &h)?;
        Ok((h, false))
    }
}
