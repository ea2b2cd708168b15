//! Run manifests: enough provenance (config snapshot, seed, file digests)
//! to reproduce any pipeline stage. Credentials never appear here; the API
//! key stays in its environment variable.

use std::collections::BTreeMap;
use std::io::Read as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub created_utc: String,
    pub tool_version: String,
    pub seed: u64,
    /// Flattened snapshot of the effective configuration.
    pub config: BTreeMap<String, String>,
    /// Input path -> sha256 hex digest.
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(run_id: impl Into<String>, seed: u64) -> RunManifest {
        RunManifest {
            run_id: run_id.into(),
            created_utc: chrono::Utc::now().to_rfc3339(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config: BTreeMap::new(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn config_entry(&mut self, key: &str, value: impl ToString) {
        self.config.insert(key.to_string(), value.to_string());
    }

    pub fn record_input(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let digest = sha256_file(&path)?;
        self.inputs.insert(path.as_ref().display().to_string(), digest);
        Ok(())
    }

    pub fn record_output(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let digest = sha256_file(&path)?;
        self.outputs.insert(path.as_ref().display().to_string(), digest);
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    let mut file = std::fs::File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 8192];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hasher.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digests_and_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.txt");
        std::fs::write(&input, "abc").unwrap();

        let mut m = RunManifest::new("gen", 7);
        m.config_entry("tasks", "conn,cyc");
        m.record_input(&input).unwrap();
        // sha256("abc")
        assert_eq!(
            m.inputs.values().next().unwrap(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );

        let path = dir.path().join("manifest.json");
        m.save(&path).unwrap();
        let loaded: RunManifest =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(loaded, m);
    }
}
