//! Shared helpers for integration tests. Each test target uses a subset,
//! so everything is allow(dead_code).
#![allow(dead_code)]

use std::path::PathBuf;

use induct::corpus::SourceManifest;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn fixture_manifest() -> SourceManifest {
    SourceManifest::load(&fixture_dir().join("manifest.json")).expect("fixture manifest loads")
}

pub fn read_golden(name: &str) -> String {
    let path = golden_dir().join(name);
    std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("golden file {} unreadable: {e}", path.display()))
}
