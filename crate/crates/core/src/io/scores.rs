//! Score files: TSV `utt_id<TAB>score<TAB>label<TAB>attack_id`, one line
//! per utterance. Scores print in the shortest form that parses back to the
//! identical f64, so write-read-write is byte-stable.

use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::{ScoreEntry, ScoreSet};

pub fn write_scores(path: &Path, scores: &ScoreSet) -> Result<()> {
    let mut out = String::new();
    for e in &scores.entries {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            e.utt_id, e.score, e.label, e.attack_id
        ));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_scores(path: &Path) -> Result<ScoreSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let fail = |detail: String| Error::parse(path, lineno, detail);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(fail(format!(
                "expected 4 tab-separated fields, found {}",
                fields.len()
            )));
        }
        let score: f64 = fields[1]
            .parse()
            .map_err(|e| fail(format!("bad score {:?}: {e}", fields[1])))?;
        if !score.is_finite() {
            return Err(fail(format!("score {score} is not finite")));
        }
        let label = fields[2].parse().map_err(|e: Error| fail(e.to_string()))?;
        entries.push(ScoreEntry {
            utt_id: fields[0].to_string(),
            score,
            label,
            attack_id: fields[3].to_string(),
        });
    }
    Ok(ScoreSet { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::ScoreLabel;

    fn sample() -> ScoreSet {
        ScoreSet {
            entries: vec![
                ScoreEntry {
                    utt_id: "u1".into(),
                    score: 1.25,
                    label: ScoreLabel::Human,
                    attack_id: "-".into(),
                },
                ScoreEntry {
                    utt_id: "u2".into(),
                    score: -0.1 / 3.0,
                    label: ScoreLabel::Spoof,
                    attack_id: "S1".into(),
                },
            ],
        }
    }

    #[test]
    fn round_trip_preserves_entries_and_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.tsv");
        let p2 = dir.path().join("b.tsv");
        let scores = sample();
        write_scores(&p1, &scores).unwrap();
        let back = read_scores(&p1).unwrap();
        assert_eq!(back, scores, "scores changed across a round trip");
        write_scores(&p2, &back).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }

    #[test]
    fn malformed_lines_report_position() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.tsv");
        std::fs::write(&p, "u1\t1.0\thuman\t-\nu2\toops\tspoof\tS1\n").unwrap();
        match read_scores(&p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_column_count_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.tsv");
        std::fs::write(&p, "u1\t1.0\thuman\n").unwrap();
        assert!(read_scores(&p).is_err());
    }
}
