//! Utterance manifests.
//!
//! Tab-separated, one utterance per line:
//!
//! ```text
//! audio_path<TAB>label<TAB>attack_id[<TAB>class_index]
//! ```
//!
//! `label` is `human` or `spoof`; human rows use `-` as their attack id and,
//! when present, class index 0. Relative audio paths resolve against the
//! manifest's own directory. Blank lines and `#` comments are skipped.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::eval::ScoreLabel;

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    /// Resolved path, verified to exist at parse time.
    pub audio_path: PathBuf,
    pub label: ScoreLabel,
    /// "-" for human rows.
    pub attack_id: String,
    /// Network training class; optional fourth column.
    pub class_index: Option<usize>,
}

impl ManifestRow {
    /// Utterance id: the audio file's stem.
    pub fn utt_id(&self) -> String {
        self.audio_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub rows: Vec<ManifestRow>,
}

impl Manifest {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Class indices for network training; every row must carry one.
    pub fn class_indices(&self) -> Result<Vec<usize>> {
        self.rows
            .iter()
            .map(|r| {
                r.class_index.ok_or_else(|| {
                    Error::Config(format!(
                        "utterance {} has no class index (manifest needs 4 columns for training)",
                        r.utt_id()
                    ))
                })
            })
            .collect()
    }
}

/// Parse and validate a manifest file.
pub fn parse_manifest(path: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new(""));

    let mut rows = Vec::new();
    let mut seen_paths = BTreeSet::new();
    let mut seen_ids = BTreeSet::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let fail = |detail: String| Error::parse(path, lineno, detail);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(fail(format!(
                "expected 3 or 4 tab-separated fields, found {}",
                fields.len()
            )));
        }

        let raw_path = Path::new(fields[0]);
        let audio_path = if raw_path.is_absolute() {
            raw_path.to_path_buf()
        } else {
            base.join(raw_path)
        };
        if !audio_path.is_file() {
            return Err(fail(format!("audio file {} does not exist", audio_path.display())));
        }

        let label: ScoreLabel = fields[1].parse().map_err(|e: Error| fail(e.to_string()))?;
        let attack_id = fields[2].to_string();
        match label {
            ScoreLabel::Human if attack_id != "-" => {
                return Err(fail(format!(
                    "human rows must use attack id \"-\", got {attack_id:?}"
                )));
            }
            ScoreLabel::Spoof if attack_id == "-" => {
                return Err(fail("spoof rows need a real attack id, not \"-\"".into()));
            }
            _ => {}
        }

        let class_index = match fields.get(3) {
            None => None,
            Some(s) => {
                let idx: usize = s
                    .parse()
                    .map_err(|e| fail(format!("bad class index {s:?}: {e}")))?;
                if label == ScoreLabel::Human && idx != 0 {
                    return Err(fail(format!(
                        "human rows must use class index 0, got {idx}"
                    )));
                }
                if label == ScoreLabel::Spoof && idx == 0 {
                    return Err(fail("class index 0 is reserved for human rows".into()));
                }
                Some(idx)
            }
        };

        let row = ManifestRow {
            audio_path,
            label,
            attack_id,
            class_index,
        };
        if !seen_paths.insert(row.audio_path.clone()) {
            return Err(fail(format!(
                "duplicate audio path {}",
                row.audio_path.display()
            )));
        }
        if !seen_ids.insert(row.utt_id()) {
            return Err(fail(format!(
                "utterance id {:?} collides with an earlier row",
                row.utt_id()
            )));
        }
        rows.push(row);
    }
    Ok(Manifest { rows })
}
