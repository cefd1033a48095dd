//! Log-likelihood-ratio scoring of a manifest against a model pair.

use std::path::PathBuf;

use anyhow::bail;
use clap::Args;
use fbcc_core::cepstral::FeatureKind;
use fbcc_core::eval::{ScoreEntry, ScoreSet};
use fbcc_core::gmm::llr_score;
use fbcc_core::io::{load_gmm_model, parse_manifest, read_features, write_scores};

use crate::sidecar::RunRecord;

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Manifest TSV listing the utterances to score
    #[arg(long)]
    pub manifest: PathBuf,

    /// Directory of per-utterance feature files from extract
    #[arg(long)]
    pub features: PathBuf,

    /// GMM JSON fit to human speech
    #[arg(long)]
    pub human_model: PathBuf,

    /// GMM JSON fit to spoofed speech
    #[arg(long)]
    pub spoof_model: PathBuf,

    /// Output score TSV
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &ScoreArgs) -> anyhow::Result<()> {
    let manifest = parse_manifest(&args.manifest)?;
    let (human, _, _) = load_gmm_model(&args.human_model)?;
    let (spoof, _, _) = load_gmm_model(&args.spoof_model)?;
    if human.dim() != spoof.dim() {
        bail!(
            "model dims differ: human {} vs spoof {}",
            human.dim(),
            spoof.dim()
        );
    }

    let mut entries = Vec::with_capacity(manifest.len());
    let mut feature_paths = Vec::with_capacity(manifest.len());
    for row in &manifest.rows {
        let utt = row.utt_id();
        let path = args.features.join(format!("{utt}.fbf1"));
        let features = read_features(&path).map_err(|e| e.for_utterance(&utt))?;
        if features.kind == FeatureKind::Power {
            bail!(
                "{}: raw power spectra cannot be scored; extract classifier features first",
                path.display()
            );
        }
        let score = llr_score(&features, &human, &spoof).map_err(|e| e.for_utterance(&utt))?;
        entries.push(ScoreEntry {
            utt_id: utt,
            score,
            label: row.label,
            attack_id: row.attack_id.clone(),
        });
        feature_paths.push(path);
    }
    let scores = ScoreSet { entries };
    write_scores(&args.out, &scores)?;

    let mut rec = RunRecord::new("score");
    rec.input("manifest", &args.manifest)?;
    rec.input("human_model", &args.human_model)?;
    rec.input("spoof_model", &args.spoof_model)?;
    rec.input_set("features", feature_paths.iter().map(|p| p.as_path()))?;
    rec.write_beside(&args.out)?;

    println!(
        "scored {} utterances -> {}",
        scores.entries.len(),
        args.out.display()
    );
    Ok(())
}
