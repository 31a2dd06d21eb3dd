//! Content-addressed report cache: one JSON file per key, written through
//! a temporary file and an atomic rename.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;
use sha2::{Digest, Sha256};

use prodone_core::Group;

use crate::report::{Report, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lookup {
    Hit,
    Miss,
    /// the entry existed but was unreadable or stale and has been removed
    Evicted,
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn disabled() -> Self {
        Cache { dir: None }
    }

    /// Opens (creating if needed) a cache directory; on failure warns and
    /// runs without a cache.
    pub fn open(dir: &Path) -> Self {
        match std::fs::create_dir_all(dir) {
            Ok(()) => Cache {
                dir: Some(dir.to_path_buf()),
            },
            Err(e) => {
                eprintln!("warning: cache disabled, cannot create {}: {e}", dir.display());
                Cache::disabled()
            }
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn key(group: &Group, computation: &str, parameters: &BTreeMap<String, Value>) -> String {
        let mut h = Sha256::new();
        h.update(SCHEMA_VERSION.to_le_bytes());
        h.update(group.canonical_bytes());
        h.update([0xff]);
        h.update(computation.as_bytes());
        h.update([0xff]);
        h.update(serde_json::to_vec(parameters).expect("parameters serialize"));
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    pub fn load(&self, key: &str) -> (Lookup, Option<Report>) {
        let Some(path) = self.path(key) else {
            return (Lookup::Miss, None);
        };
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(_) => return (Lookup::Miss, None),
        };
        match serde_json::from_str::<Report>(&text) {
            Ok(r) if r.schema_version == SCHEMA_VERSION => (Lookup::Hit, Some(r)),
            _ => {
                if let Err(e) = std::fs::remove_file(&path) {
                    eprintln!("warning: cannot evict {}: {e}", path.display());
                }
                (Lookup::Evicted, None)
            }
        }
    }

    pub fn store(&self, key: &str, report: &Report) {
        let (Some(dir), Some(path)) = (self.dir.as_ref(), self.path(key)) else {
            return;
        };
        let write = || -> std::io::Result<()> {
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(report.to_json().as_bytes())?;
            tmp.persist(&path).map_err(|e| e.error)?;
            Ok(())
        };
        if let Err(e) = write() {
            eprintln!("warning: cache write failed for {}: {e}", path.display());
        }
    }
}
