//! Source manifest: pins every external file to a sha256 digest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceFormat {
    TsvLexicon,
    FreqTable,
    PronDict,
    PairTsv,
    LabeledJsonl,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceEntry {
    pub path: PathBuf,
    pub sha256: String,
    pub format: SourceFormat,
}

/// Maps source ids to digest-pinned files. Relative paths resolve against
/// the manifest file's directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceManifest {
    pub entries: BTreeMap<String, SourceEntry>,
    #[serde(skip)]
    base_dir: PathBuf,
}

impl SourceManifest {
    /// A manifest with no entries, for tasks that read no sources.
    pub fn empty() -> SourceManifest {
        SourceManifest {
            entries: BTreeMap::new(),
            base_dir: PathBuf::new(),
        }
    }

    pub fn load(path: &Path) -> Result<SourceManifest> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest: SourceManifest =
            serde_json::from_str(&text).map_err(|e| Error::parse(path, 1, e.to_string()))?;
        manifest.base_dir = path
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .to_path_buf();
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn resolve(&self, source_id: &str) -> Result<&SourceEntry> {
        self.entries
            .get(source_id)
            .ok_or_else(|| Error::UnknownSource(source_id.to_string()))
    }

    pub fn path_of(&self, source_id: &str) -> Result<PathBuf> {
        let entry = self.resolve(source_id)?;
        Ok(if entry.path.is_absolute() {
            entry.path.clone()
        } else {
            self.base_dir.join(&entry.path)
        })
    }

    /// Digest-checked read. A mismatch is a hard error naming the source.
    pub fn read(&self, source_id: &str) -> Result<(PathBuf, String)> {
        let entry = self.resolve(source_id)?;
        let path = self.path_of(source_id)?;
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        let actual = sha256_hex(&bytes);
        if !actual.eq_ignore_ascii_case(&entry.sha256) {
            return Err(Error::DigestMismatch {
                source_id: source_id.to_string(),
                expected: entry.sha256.clone(),
                actual,
            });
        }
        String::from_utf8(bytes)
            .map(|text| (path.clone(), text))
            .map_err(|_| Error::parse(&path, 1, "file is not valid UTF-8"))
    }

    /// Verify every entry's digest without keeping contents.
    pub fn verify_all(&self) -> Result<()> {
        for id in self.entries.keys() {
            self.read(id)?;
        }
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_manifest(dir: &Path, entries: &str) -> PathBuf {
        let path = dir.join("manifest.json");
        std::fs::write(&path, format!("{{\"entries\":{{{entries}}}}}")).unwrap();
        path
    }

    #[test]
    fn digest_check_passes_and_fails() {
        let dir = tempfile::tempdir().unwrap();
        let src = dir.path().join("words.tsv");
        std::fs::write(&src, "cat\t10\n").unwrap();
        let digest = sha256_hex(b"cat\t10\n");

        let path = write_manifest(
            dir.path(),
            &format!(
                r#""freq": {{"path": "words.tsv", "sha256": "{digest}", "format": "freq-table"}}"#
            ),
        );
        let manifest = SourceManifest::load(&path).unwrap();
        let (_, text) = manifest.read("freq").unwrap();
        assert_eq!(text, "cat\t10\n");

        // Corrupt the file; the read must fail with a digest mismatch naming
        // the source.
        std::fs::write(&src, "dog\t10\n").unwrap();
        let err = manifest.read("freq").unwrap_err();
        assert_eq!(err.category(), "digest-mismatch");
        assert!(err.to_string().contains("freq"));
    }

    #[test]
    fn unknown_source_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_manifest(dir.path(), "");
        let manifest = SourceManifest::load(&path).unwrap();
        assert_eq!(
            manifest.read("nope").unwrap_err().category(),
            "unknown-source"
        );
    }
}
