use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes through a sibling temporary file and a rename, so readers never
/// see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let write = || -> std::io::Result<()> {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub config_sha256: String,
    pub seed: u64,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

/// Per-stage record of the configuration digest, seed and the sha256 of
/// every file read and written. Output keys are relative to the output
/// directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub stages: BTreeMap<String, StageRecord>,
}

impl Default for Manifest {
    fn default() -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            stages: BTreeMap::new(),
        }
    }
}

impl Manifest {
    pub fn load(out: &Path) -> Result<Self> {
        let path = out.join(MANIFEST_FILE);
        match std::fs::read(&path) {
            Ok(bytes) => serde_json::from_slice(&bytes).map_err(|e| Error::Malformed {
                line: e.line(),
                message: format!("{}: {e}", path.display()),
            }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::default()),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    pub fn save(&self, out: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        write_atomic(&out.join(MANIFEST_FILE), text.as_bytes())
    }

    /// Stage that recorded `key` as an output, with its digest.
    pub fn producer(&self, key: &str) -> Option<(&str, &str)> {
        self.stages
            .iter()
            .find_map(|(s, r)| r.outputs.get(key).map(|d| (s.as_str(), d.as_str())))
    }

    /// Errors when `bytes` differ from the digest recorded for `key`.
    pub fn verify(&self, out: &Path, key: &str, bytes: &[u8]) -> Result<()> {
        match self.producer(key) {
            Some((stage, digest)) if digest != sha256_hex(bytes) => Err(Error::Tampered {
                path: out.join(key),
                stage: stage.to_string(),
            }),
            _ => Ok(()),
        }
    }
}

/// Manifest key of `path`: relative to `out` when inside it.
pub fn artifact_key(out: &Path, path: &Path) -> String {
    path.strip_prefix(out)
        .map(|p| p.to_string_lossy().replace('\\', "/"))
        .unwrap_or_else(|_| path.display().to_string())
}

/// Reads and writes one stage's files while recording their digests.
pub struct StageIo {
    out: PathBuf,
    manifest: Manifest,
    record: StageRecord,
}

impl StageIo {
    pub fn open(out: &Path, config_sha256: String, seed: u64) -> Result<Self> {
        Ok(Self {
            out: out.to_path_buf(),
            manifest: Manifest::load(out)?,
            record: StageRecord {
                config_sha256,
                seed,
                ..StageRecord::default()
            },
        })
    }

    pub fn out(&self) -> &Path {
        &self.out
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    /// Reads `path`, failing with a pointer to `stage` when it is missing
    /// and with a tamper error when its digest disagrees with the manifest.
    pub fn read(&mut self, path: &Path, stage: &'static str) -> Result<Vec<u8>> {
        let bytes = match std::fs::read(path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(Error::MissingArtifact {
                    path: path.to_path_buf(),
                    stage,
                })
            }
            Err(e) => return Err(Error::io(path, e)),
        };
        let key = artifact_key(&self.out, path);
        self.manifest.verify(&self.out, &key, &bytes)?;
        self.record.inputs.insert(key, sha256_hex(&bytes));
        Ok(bytes)
    }

    /// Reads `<out>/<rel>`.
    pub fn read_artifact(&mut self, rel: &str, stage: &'static str) -> Result<Vec<u8>> {
        let path = self.out.join(rel);
        self.read(&path, stage)
    }

    /// Relative paths written so far.
    pub fn outputs(&self) -> Vec<String> {
        self.record.outputs.keys().cloned().collect()
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.out.join(rel), bytes)?;
        self.record.outputs.insert(rel.to_string(), sha256_hex(bytes));
        Ok(())
    }

    /// Replaces the stage's manifest entry.
    pub fn finish(mut self, stage: &str) -> Result<()> {
        let fresh = Manifest::load(&self.out)?;
        self.manifest.stages = fresh.stages;
        self.manifest.stages.insert(stage.to_string(), self.record);
        self.manifest.save(&self.out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_matches_known_value() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn atomic_write_leaves_no_temporaries() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a/b.csv");
        write_atomic(&p, b"x,y\n").unwrap();
        write_atomic(&p, b"x,z\n").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"x,z\n");
        assert_eq!(std::fs::read_dir(dir.path().join("a")).unwrap().count(), 1);
    }

    #[test]
    fn tampering_is_detected_and_missing_files_name_their_stage() {
        let dir = tempfile::tempdir().unwrap();
        let mut io = StageIo::open(dir.path(), "c".into(), 1).unwrap();
        io.write("s/a.csv", b"1\n").unwrap();
        io.finish("first").unwrap();

        let mut io = StageIo::open(dir.path(), "c".into(), 1).unwrap();
        assert_eq!(io.read_artifact("s/a.csv", "first").unwrap(), b"1\n");
        std::fs::write(dir.path().join("s/a.csv"), b"2\n").unwrap();
        assert!(matches!(io.read_artifact("s/a.csv", "first"), Err(Error::Tampered { stage, .. }) if stage == "first"));
        assert!(matches!(
            io.read_artifact("s/b.csv", "first"),
            Err(Error::MissingArtifact { stage: "first", .. })
        ));
    }

    #[test]
    fn stages_keep_each_others_records() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = StageIo::open(dir.path(), "c".into(), 1).unwrap();
        a.write("a.txt", b"a").unwrap();
        a.finish("a").unwrap();
        let mut b = StageIo::open(dir.path(), "c".into(), 1).unwrap();
        b.write("b.txt", b"b").unwrap();
        b.finish("b").unwrap();
        let m = Manifest::load(dir.path()).unwrap();
        assert_eq!(m.stages.len(), 2);
        assert_eq!(m.producer("a.txt").unwrap().0, "a");
    }
}
