//! Run provenance records.
//!
//! Every subcommand that produces an artifact drops a small JSON file next to
//! it describing how it was made: the subcommand, its effective arguments
//! (defaults included), the seed if one was involved, and SHA-256 digests of
//! the inputs. Records are byte-deterministic: sorted maps, no timestamps,
//! and digests rather than absolute paths.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    /// Effective argument values keyed by flag name.
    pub args: BTreeMap<String, String>,
    pub seed: Option<u64>,
    /// SHA-256 hex digest per named input.
    pub inputs: BTreeMap<String, String>,
}

impl RunRecord {
    pub fn new(command: &str) -> Self {
        RunRecord {
            command: command.to_string(),
            args: BTreeMap::new(),
            seed: None,
            inputs: BTreeMap::new(),
        }
    }

    pub fn arg(&mut self, key: &str, value: impl Display) {
        self.args.insert(key.to_string(), value.to_string());
    }

    pub fn seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    /// Digest a single input file.
    pub fn input(&mut self, name: &str, path: &Path) -> anyhow::Result<()> {
        self.inputs.insert(name.to_string(), file_digest(path)?);
        Ok(())
    }

    /// Digest a group of files as one named input: the digest of their
    /// individual digests, in the given order.
    pub fn input_set<'a>(
        &mut self,
        name: &str,
        paths: impl IntoIterator<Item = &'a Path>,
    ) -> anyhow::Result<()> {
        let mut outer = Sha256::new();
        for path in paths {
            outer.update(file_digest(path)?.as_bytes());
        }
        let digest = outer.finalize();
        self.inputs.insert(name.to_string(), hex(digest.as_slice()));
        Ok(())
    }

    /// Write the record at `<artifact>.run.json`, next to the artifact.
    pub fn write_beside(&self, artifact: &Path) -> anyhow::Result<PathBuf> {
        let path = sidecar_path(artifact);
        self.write(&path)?;
        Ok(path)
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(self).context("encoding run record")?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}

/// Sidecar path for an artifact: `model.json` records to `model.json.run.json`.
pub fn sidecar_path(artifact: &Path) -> PathBuf {
    let mut name = artifact
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".run.json");
    artifact.with_file_name(name)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(Sha256::digest(bytes).as_slice())
}

pub fn file_digest(path: &Path) -> anyhow::Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(sha256_hex(&bytes))
}

fn hex(digest: &[u8]) -> String {
    use std::fmt::Write;
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_matches_known_vector() {
        // SHA-256 of the empty string and of "abc" are standard test vectors.
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn sidecar_path_appends_to_the_full_name() {
        assert_eq!(
            sidecar_path(Path::new("/tmp/out/model.json")),
            Path::new("/tmp/out/model.json.run.json")
        );
        assert_eq!(
            sidecar_path(Path::new("scores.tsv")),
            Path::new("scores.tsv.run.json")
        );
    }

    #[test]
    fn records_serialize_deterministically() {
        let dir = tempfile::tempdir().unwrap();
        let artifact = dir.path().join("bank.csv");

        let mut rec = RunRecord::new("make-bank");
        rec.arg("nfft", 512);
        rec.arg("kind", "triangular");
        rec.seed(7);
        let input = dir.path().join("in.txt");
        fs::write(&input, "hello").unwrap();
        rec.input("manifest", &input).unwrap();

        let side = rec.write_beside(&artifact).unwrap();
        assert_eq!(side, dir.path().join("bank.csv.run.json"));
        let first = fs::read(&side).unwrap();
        rec.write_beside(&artifact).unwrap();
        let second = fs::read(&side).unwrap();
        assert_eq!(first, second);

        let parsed: RunRecord = serde_json::from_slice(&first).unwrap();
        assert_eq!(parsed, rec);
        assert_eq!(parsed.seed, Some(7));
        assert_eq!(parsed.inputs["manifest"], sha256_hex(b"hello"));
    }

    #[test]
    fn input_set_depends_on_order_and_content() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        fs::write(&a, "one").unwrap();
        fs::write(&b, "two").unwrap();

        let digest_of = |paths: Vec<&Path>| {
            let mut rec = RunRecord::new("x");
            rec.input_set("files", paths).unwrap();
            rec.inputs["files"].clone()
        };
        let ab = digest_of(vec![&a, &b]);
        assert_eq!(ab, digest_of(vec![&a, &b]));
        assert_ne!(ab, digest_of(vec![&b, &a]));
        fs::write(&b, "two!").unwrap();
        assert_ne!(ab, digest_of(vec![&a, &b]));
    }
}
