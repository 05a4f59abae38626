//! The run manifest: configuration, per-run status and content hashes of every output.
//!
//! `manifest_hash` is the SHA-256 of the compact JSON encoding of the other fields. Nothing
//! time- or host-dependent is recorded, so rerunning a plan reproduces the hash exactly.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::RunnerError;
use crate::FORMAT_VERSION;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub problem: String,
    pub status: RunStatus,
    pub budget: u64,
    pub evaluations_used: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub config: serde_json::Value,
    pub runs: Vec<RunEntry>,
    /// Relative path to SHA-256 hex digest.
    pub outputs: BTreeMap<String, String>,
    pub manifest_hash: String,
}

#[derive(Serialize)]
struct Hashed<'a> {
    format_version: u32,
    config: &'a serde_json::Value,
    runs: &'a [RunEntry],
    outputs: &'a BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Manifest {
    pub fn new(
        config: serde_json::Value,
        runs: Vec<RunEntry>,
        outputs: BTreeMap<String, String>,
    ) -> Self {
        let mut m = Self {
            format_version: FORMAT_VERSION,
            config,
            runs,
            outputs,
            manifest_hash: String::new(),
        };
        m.manifest_hash = m.compute_hash();
        m
    }

    pub fn compute_hash(&self) -> String {
        let body = Hashed {
            format_version: self.format_version,
            config: &self.config,
            runs: &self.runs,
            outputs: &self.outputs,
        };
        sha256_hex(&serde_json::to_vec(&body).expect("manifest serializes"))
    }

    pub fn failures(&self) -> usize {
        self.runs
            .iter()
            .filter(|r| r.status == RunStatus::Failed)
            .count()
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn read(dir: &Path) -> Result<Self, RunnerError> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| RunnerError::io(&path, e))?;
        let m: Self = serde_json::from_str(&text)
            .map_err(|e| RunnerError::parse(&path, e.line(), e.to_string()))?;
        if m.format_version != FORMAT_VERSION {
            return Err(RunnerError::Manifest(format!(
                "unsupported format version {}",
                m.format_version
            )));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn hash_covers_every_field() {
        let runs = vec![RunEntry {
            problem: "f1_d2_i1".into(),
            status: RunStatus::Ok,
            budget: 2000,
            evaluations_used: 2000,
            log: Some("logs/f1_d2_i1.csv".into()),
            error: None,
        }];
        let outputs: BTreeMap<_, _> = [("art.tsv".to_string(), sha256_hex(b"x"))].into();
        let m = Manifest::new(serde_json::json!({"a": 1}), runs, outputs);
        assert_eq!(m.manifest_hash, m.compute_hash());

        let mut changed = m.clone();
        changed.runs[0].evaluations_used = 1999;
        assert_ne!(changed.compute_hash(), m.manifest_hash);
        let mut changed = m.clone();
        changed.outputs.insert("art.tsv".into(), sha256_hex(b"y"));
        assert_ne!(changed.compute_hash(), m.manifest_hash);

        let back: Manifest = serde_json::from_str(&m.render()).unwrap();
        assert_eq!(back, m);
    }
}
