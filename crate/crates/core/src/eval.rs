//! Equal error rate and report aggregation.
//!
//! Scores are "higher means more human". With threshold t accepting scores
//! >= t as human, the false rejection rate is FRR(t) = P(human < t) and the
//! false acceptance rate is FAR(t) = P(spoof >= t). FRR rises and FAR falls
//! as t sweeps upward, so they cross exactly once; the EER is the value at
//! that crossing, linearly interpolated between adjacent operating points.
//!
//! Reports follow the usual spoofing-benchmark shape: one EER per attack
//! (each attack's spoof scores against the full human set), then unweighted
//! means over the known group, the unknown group, and all attacks.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Class of a scored utterance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreLabel {
    Human,
    Spoof,
}

impl fmt::Display for ScoreLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoreLabel::Human => "human",
            ScoreLabel::Spoof => "spoof",
        })
    }
}

impl FromStr for ScoreLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "human" => Ok(ScoreLabel::Human),
            "spoof" => Ok(ScoreLabel::Spoof),
            other => Err(Error::Config(format!(
                "unknown label {other:?} (expected human or spoof)"
            ))),
        }
    }
}

/// One scored utterance. Human entries use "-" as their attack id.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreEntry {
    pub utt_id: String,
    pub score: f64,
    pub label: ScoreLabel,
    pub attack_id: String,
}

/// A full evaluation set of scored utterances.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreSet {
    pub entries: Vec<ScoreEntry>,
}

impl ScoreSet {
    pub fn human_scores(&self) -> Vec<f64> {
        self.entries
            .iter()
            .filter(|e| e.label == ScoreLabel::Human)
            .map(|e| e.score)
            .collect()
    }

    pub fn spoof_scores_for(&self, attack: &str) -> Vec<f64> {
        self.entries
            .iter()
            .filter(|e| e.label == ScoreLabel::Spoof && e.attack_id == attack)
            .map(|e| e.score)
            .collect()
    }
}

fn operating_points(pos: &[f64], neg: &[f64]) -> Vec<(f64, f64)> {
    // (FAR, FRR) at every distinct score threshold, in increasing threshold
    // order, bracketed by the trivial endpoints (1, 0) and (0, 1).
    let mut thresholds: Vec<f64> = pos.iter().chain(neg.iter()).cloned().collect();
    thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thresholds.dedup();

    let np = pos.len() as f64;
    let nn = neg.len() as f64;
    let mut points = Vec::with_capacity(thresholds.len() + 2);
    points.push((1.0, 0.0));
    for &t in &thresholds {
        let frr = pos.iter().filter(|&&s| s < t).count() as f64 / np;
        let far = neg.iter().filter(|&&s| s >= t).count() as f64 / nn;
        points.push((far, frr));
    }
    points.push((0.0, 1.0));
    points
}

/// EER as a fraction in [0, 1]. `pos` are human scores, `neg` spoof scores.
pub fn compute_eer(pos: &[f64], neg: &[f64]) -> Result<f64> {
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::Eval(
            "EER needs at least one human and one spoof score".into(),
        ));
    }
    if pos.iter().chain(neg.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Eval("scores must be finite".into()));
    }

    let points = operating_points(pos, neg);
    for w in points.windows(2) {
        let (far1, frr1) = w[0];
        let (far2, frr2) = w[1];
        let d1 = frr1 - far1;
        let d2 = frr2 - far2;
        if d2 >= 0.0 {
            if d2 == 0.0 {
                return Ok(far2);
            }
            if d1 == 0.0 {
                return Ok(far1);
            }
            // Sign change inside this segment: solve frr(a) = far(a) on the
            // straight line between the two operating points.
            let alpha = -d1 / (d2 - d1);
            return Ok(far1 + alpha * (far2 - far1));
        }
    }
    unreachable!("FRR - FAR reaches +1 at the upper endpoint");
}

/// Table-shaped evaluation summary. All rates are percentages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// EER per attack, full human set vs. that attack's spoofs.
    pub per_attack_eer: BTreeMap<String, f64>,
    /// Unweighted mean over known attacks present in the scores.
    pub known_avg: Option<f64>,
    /// Unweighted mean over unknown attacks present in the scores.
    pub unknown_avg: Option<f64>,
    /// Unweighted mean over every attack present.
    pub all_avg: f64,
    /// Declared attacks that had no trials and were excluded.
    pub skipped_attacks: Vec<String>,
    /// EER of all unknown-attack spoofs pooled into one set, if requested.
    pub pooled_unknown_eer: Option<f64>,
}

impl EvalReport {
    /// Plain-text rendering: one row per attack, then the group averages.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str("attack        EER%\n");
        for (attack, eer) in &self.per_attack_eer {
            out.push_str(&format!("{attack:<12}  {eer:.4}\n"));
        }
        if let Some(v) = self.known_avg {
            out.push_str(&format!("{:<12}  {v:.4}\n", "known avg"));
        }
        if let Some(v) = self.unknown_avg {
            out.push_str(&format!("{:<12}  {v:.4}\n", "unknown avg"));
        }
        out.push_str(&format!("{:<12}  {:.4}\n", "all avg", self.all_avg));
        if let Some(v) = self.pooled_unknown_eer {
            out.push_str(&format!("{:<12}  {v:.4}\n", "pooled unk"));
        }
        if !self.skipped_attacks.is_empty() {
            out.push_str(&format!(
                "skipped (no trials): {}\n",
                self.skipped_attacks.join(", ")
            ));
        }
        out
    }
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Build the per-attack / known / unknown / all report. Every spoof entry's
/// attack must be declared in one of the two groups; declared attacks with
/// no trials are skipped and listed. `pool_unknown` additionally reports
/// the EER of all unknown spoofs as a single set.
pub fn aggregate_report(
    scores: &ScoreSet,
    known: &BTreeSet<String>,
    unknown: &BTreeSet<String>,
    pool_unknown: bool,
) -> Result<EvalReport> {
    if let Some(both) = known.intersection(unknown).next() {
        return Err(Error::Eval(format!(
            "attack {both} is declared both known and unknown"
        )));
    }
    let humans = scores.human_scores();
    if humans.is_empty() {
        return Err(Error::Eval("no human entries in the score set".into()));
    }
    for e in &scores.entries {
        if e.label == ScoreLabel::Spoof && !known.contains(&e.attack_id) && !unknown.contains(&e.attack_id)
        {
            return Err(Error::Eval(format!(
                "utterance {}: attack {} is not declared known or unknown",
                e.utt_id, e.attack_id
            )));
        }
    }

    let mut per_attack_eer = BTreeMap::new();
    let mut skipped = Vec::new();
    let mut known_eers = Vec::new();
    let mut unknown_eers = Vec::new();
    for (group, eers) in [(known, &mut known_eers), (unknown, &mut unknown_eers)] {
        for attack in group {
            let spoofs = scores.spoof_scores_for(attack);
            if spoofs.is_empty() {
                skipped.push(attack.clone());
                continue;
            }
            let eer = 100.0 * compute_eer(&humans, &spoofs)?;
            per_attack_eer.insert(attack.clone(), eer);
            eers.push(eer);
        }
    }
    if per_attack_eer.is_empty() {
        return Err(Error::Eval("no attack has any trials".into()));
    }

    let all: Vec<f64> = per_attack_eer.values().cloned().collect();
    let pooled_unknown_eer = if pool_unknown {
        let pooled: Vec<f64> = scores
            .entries
            .iter()
            .filter(|e| e.label == ScoreLabel::Spoof && unknown.contains(&e.attack_id))
            .map(|e| e.score)
            .collect();
        if pooled.is_empty() {
            None
        } else {
            Some(100.0 * compute_eer(&humans, &pooled)?)
        }
    } else {
        None
    };

    Ok(EvalReport {
        per_attack_eer,
        known_avg: mean(&known_eers),
        unknown_avg: mean(&unknown_eers),
        all_avg: mean(&all).expect("at least one attack present"),
        skipped_attacks: skipped,
        pooled_unknown_eer,
    })
}
