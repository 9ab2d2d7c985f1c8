//! Run manifests: every subcommand writes one next to its outputs, holding
//! the fully resolved configuration. `rnmf rerun --manifest <file>` replays
//! the run and reproduces every output byte for byte (the manifest itself
//! differs only in its `duration_ms` and `out_dir` entries).

use std::path::Path;

use crate::error::Result;
use crate::kv::KvFile;

pub const MANIFEST_FILE: &str = "manifest.txt";

/// Keys that legitimately differ between a run and its rerun.
pub const VOLATILE_KEYS: &[&str] = &["duration_ms", "out_dir"];

#[derive(Debug, Clone)]
pub struct RunManifest {
    kv: KvFile,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        let mut kv = KvFile::new();
        kv.push("subcommand", subcommand);
        kv.push("version", env!("CARGO_PKG_VERSION"));
        RunManifest { kv }
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.kv.push(key, value);
        self
    }

    pub fn finish(mut self, out_dir: &Path, duration_ms: u128) -> Result<()> {
        self.kv.push("duration_ms", duration_ms);
        self.kv.write(out_dir.join(MANIFEST_FILE))
    }

    pub fn kv(&self) -> &KvFile {
        &self.kv
    }
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<KvFile> {
    KvFile::read(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_records_subcommand_and_version() {
        let m = RunManifest::new("factorize");
        assert_eq!(m.kv().get("subcommand"), Some("factorize"));
        assert_eq!(m.kv().get("version"), Some(env!("CARGO_PKG_VERSION")));
    }
}
