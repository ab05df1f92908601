//! Run manifests: the config as read, the artifact version, start and end
//! times and a SHA-256 per output file, as `key=value` lines.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

use crate::config::Entry;
use crate::csv::write_atomic;

pub const MANIFEST_NAME: &str = "manifest.txt";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunManifest {
    pub version: String,
    pub config: Vec<(String, String)>,
    pub started: String,
    pub finished: String,
    /// `(file name, hex SHA-256, size in bytes)`.
    pub outputs: Vec<(String, String, u64)>,
}

pub fn now() -> String {
    OffsetDateTime::now_utc().format(&Rfc3339).unwrap_or_else(|_| "unknown".into())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(entries: &[Entry], started: String) -> Self {
        RunManifest {
            version: env!("CARGO_PKG_VERSION").into(),
            config: entries.iter().map(|e| (e.key.clone(), e.value.clone())).collect(),
            started,
            finished: String::new(),
            outputs: Vec::new(),
        }
    }

    pub fn add_output(&mut self, name: &str, bytes: &[u8]) {
        self.outputs.push((name.into(), sha256_hex(bytes), bytes.len() as u64));
    }

    pub fn render(&self) -> String {
        let mut s = String::from("# palmdt run manifest\n");
        s += &format!("version={}\nstarted={}\nfinished={}\n", self.version, self.started, self.finished);
        for (k, v) in &self.config {
            s += &format!("config.{k}={v}\n");
        }
        for (name, hash, len) in &self.outputs {
            s += &format!("output.{name}=sha256:{hash} bytes={len}\n");
        }
        s
    }

    pub fn write(&mut self, dir: &Path) -> std::io::Result<PathBuf> {
        self.finished = now();
        let path = dir.join(MANIFEST_NAME);
        write_atomic(&path, self.render().as_bytes())?;
        Ok(path)
    }
}

/// Recomputes each output's checksum; returns the files that disagree.
pub fn verify(dir: &Path) -> std::io::Result<Vec<String>> {
    let text = std::fs::read_to_string(dir.join(MANIFEST_NAME))?;
    let mut bad = Vec::new();
    for line in text.lines() {
        let Some(rest) = line.strip_prefix("output.") else { continue };
        let Some((name, val)) = rest.split_once('=') else { continue };
        let want = val.strip_prefix("sha256:").and_then(|v| v.split_whitespace().next()).unwrap_or("");
        let ok = std::fs::read(dir.join(name)).map(|b| sha256_hex(&b) == want).unwrap_or(false);
        if !ok {
            bad.push(name.to_string());
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn verify_spots_tampering() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.csv"), "x\n1\n").unwrap();
        let mut m = RunManifest::new(&[], now());
        m.add_output("a.csv", b"x\n1\n");
        m.write(dir.path()).unwrap();
        assert!(verify(dir.path()).unwrap().is_empty());
        std::fs::write(dir.path().join("a.csv"), "x\n2\n").unwrap();
        assert_eq!(verify(dir.path()).unwrap(), vec!["a.csv".to_string()]);
    }
}
