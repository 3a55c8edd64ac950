//! Run manifests: enough provenance to reproduce a report byte-for-byte.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Embedded in every report. Two runs with equal manifests (same argv, seeds,
/// and input digests) produce byte-identical reports; timestamps are recorded
/// only when supplied explicitly, never from the wall clock.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub seeds: BTreeMap<String, u64>,
    /// Input-file digests (sha256, hex), keyed by flag name.
    pub inputs: BTreeMap<String, String>,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl RunManifest {
    pub fn new(command: &str, argv: Vec<String>, timestamp: Option<String>) -> Self {
        RunManifest {
            command: command.to_owned(),
            argv,
            seeds: BTreeMap::new(),
            inputs: BTreeMap::new(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            timestamp,
        }
    }

    pub fn seed(&mut self, name: &str, value: u64) {
        self.seeds.insert(name.to_owned(), value);
    }

    pub fn input(&mut self, name: &str, path: &Path) -> std::io::Result<()> {
        let bytes = std::fs::read(path)?;
        self.inputs.insert(name.to_owned(), sha256_hex(&bytes));
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}
