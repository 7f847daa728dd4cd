//! Content-addressed report cache.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use restriction_core::VerificationReport;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub struct Cache {
    dir: PathBuf,
}

/// SHA-256 of the canonical JSON form of `value`, tagged with the crate version.
pub fn key<T: Serialize>(value: &T) -> String {
    let mut h = Sha256::new();
    h.update(env!("CARGO_PKG_VERSION").as_bytes());
    h.update([0]);
    h.update(serde_json::to_vec(value).expect("cache keys serialize"));
    hex::encode(h.finalize())
}

impl Cache {
    pub fn open(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating cache dir {}", dir.display()))?;
        Ok(Cache { dir: dir.to_path_buf() })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A missing or unreadable entry is a miss.
    pub fn load(&self, key: &str) -> Option<VerificationReport> {
        let text = std::fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn store(&self, key: &str, report: &VerificationReport) -> Result<()> {
        let tmp = self.dir.join(format!(".{key}.{}.tmp", std::process::id()));
        std::fs::write(&tmp, serde_json::to_vec(report)?)?;
        std::fs::rename(&tmp, self.path(key))?;
        Ok(())
    }
}
