//! Artifact summaries: one JSON object on stdout per file. The only
//! subcommand that writes nothing, so it leaves no run record.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::Args;
use fbcc_core::audio::read_wav_mono16;
use fbcc_core::cepstral::FeatureKind;
use fbcc_core::eval::{EvalReport, ScoreLabel};
use fbcc_core::filterbank::read_bank_csv;
use fbcc_core::io::model::{FBNN_FORMAT, GMM_FORMAT};
use fbcc_core::io::{load_fbnn_model, load_gmm_model, parse_manifest, read_features, read_scores};
use serde_json::{json, Value};

#[derive(Debug, Args)]
pub struct InspectArgs {
    /// Artifact: .wav, .fbf1, bank .csv, manifest/score .tsv, or .json
    #[arg(long)]
    pub file: PathBuf,
}

pub fn run(args: &InspectArgs) -> anyhow::Result<()> {
    let ext = args.file.extension().and_then(|e| e.to_str()).unwrap_or("");
    let summary = match ext {
        "wav" => wav_summary(&args.file)?,
        "fbf1" => features_summary(&args.file)?,
        "csv" => bank_summary(&args.file)?,
        "tsv" => tsv_summary(&args.file)?,
        "json" => json_summary(&args.file)?,
        other => bail!("no inspector for {other:?} files (wav, fbf1, csv, tsv or json)"),
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn wav_summary(path: &Path) -> anyhow::Result<Value> {
    let audio = read_wav_mono16(path)?;
    Ok(json!({
        "type": "audio",
        "sample_rate": audio.sample_rate,
        "samples": audio.len(),
        "seconds": audio.duration_secs(),
    }))
}

fn kind_name(kind: FeatureKind) -> &'static str {
    match kind {
        FeatureKind::Power => "power",
        FeatureKind::Fbank => "fbank",
        FeatureKind::Cep => "cepstra",
        FeatureKind::CepDeltas => "cepstra_deltas",
    }
}

fn features_summary(path: &Path) -> anyhow::Result<Value> {
    let features = read_features(path)?;
    Ok(json!({
        "type": "features",
        "kind": kind_name(features.kind),
        "frames": features.num_frames(),
        "dim": features.dim(),
    }))
}

fn bank_summary(path: &Path) -> anyhow::Result<Value> {
    let bank = read_bank_csv(path)?;
    Ok(json!({
        "type": "filter_bank",
        "bins": bank.dim(),
        "channels": bank.channels(),
        "nfft": bank.nfft(),
        "sample_rate": bank.sample_rate,
    }))
}

fn tsv_summary(path: &Path) -> anyhow::Result<Value> {
    // Score files and manifests share the extension; try scores first since
    // their shape is stricter (a float in column 2).
    let scores_err = match read_scores(path) {
        Ok(scores) => {
            let human = scores.entries.iter().filter(|e| e.label == ScoreLabel::Human).count();
            let attacks: std::collections::BTreeSet<&str> = scores
                .entries
                .iter()
                .filter(|e| e.label == ScoreLabel::Spoof)
                .map(|e| e.attack_id.as_str())
                .collect();
            return Ok(json!({
                "type": "scores",
                "entries": scores.entries.len(),
                "human": human,
                "spoof": scores.entries.len() - human,
                "attacks": attacks.len(),
            }));
        }
        Err(e) => e,
    };
    let manifest = parse_manifest(path).map_err(|e| {
        anyhow!("not a score file ({scores_err}) and not a manifest ({e})")
    })?;
    let human = manifest.rows.iter().filter(|r| r.label == ScoreLabel::Human).count();
    let with_class = manifest.rows.iter().filter(|r| r.class_index.is_some()).count();
    Ok(json!({
        "type": "manifest",
        "utterances": manifest.len(),
        "human": human,
        "spoof": manifest.len() - human,
        "with_class": with_class,
    }))
}

fn json_summary(path: &Path) -> anyhow::Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    match value.get("format").and_then(Value::as_str) {
        Some(FBNN_FORMAT) => {
            let (model, cfg, losses) = load_fbnn_model(path)?;
            Ok(json!({
                "type": "fbnn_model",
                "input_dim": model.input_dim(),
                "channels": model.channels(),
                "h2": cfg.h2_nodes,
                "outputs": model.n_out(),
                "epochs": losses.len(),
                "final_loss": losses.last(),
            }))
        }
        Some(GMM_FORMAT) => {
            let (model, cfg, trace) = load_gmm_model(path)?;
            Ok(json!({
                "type": "gmm_model",
                "components": model.k(),
                "dim": model.dim(),
                "em_iters": cfg.em_iters,
                "final_log_likelihood": trace.last(),
            }))
        }
        Some(other) => bail!("{}: unknown model format {other:?}", path.display()),
        None if value.get("per_attack_eer").is_some() => {
            let report: EvalReport = serde_json::from_value(value)?;
            Ok(json!({
                "type": "eval_report",
                "attacks": report.per_attack_eer.len(),
                "known_avg": report.known_avg,
                "unknown_avg": report.unknown_avg,
                "all_avg": report.all_avg,
            }))
        }
        None if value.get("command").is_some() => Ok(json!({
            "type": "run_record",
            "command": value["command"],
        })),
        None => bail!("{}: unrecognized JSON artifact", path.display()),
    }
}
