//! Network training: pooled power-spectrum frames labeled per utterance.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Args;
use fbcc_core::cepstral::FeatureKind;
use fbcc_core::fbnn::{train_fbnn, TrainConfig};
use fbcc_core::filterbank::build_filter_bank;
use fbcc_core::io::{parse_manifest, read_features, save_fbnn_model};
use ndarray::Array2;

use crate::opts::BankOpts;
use crate::sidecar::RunRecord;

#[derive(Debug, Args)]
pub struct TrainFbnnArgs {
    /// Manifest TSV; every row needs the class-index column
    #[arg(long)]
    pub manifest: PathBuf,

    /// Directory of per-utterance power files from `extract --mode power`
    #[arg(long)]
    pub features: PathBuf,

    #[command(flatten)]
    pub bank: BankOpts,

    /// Training epochs
    #[arg(long, default_value_t = 30)]
    pub epochs: usize,

    /// Minibatch size
    #[arg(long, default_value_t = 128)]
    pub batch_size: usize,

    /// Second hidden layer width
    #[arg(long, default_value_t = 100)]
    pub h2: usize,

    /// RNG seed driving weight init and epoch shuffles
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output model JSON
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &TrainFbnnArgs) -> anyhow::Result<()> {
    let resolved = args.bank.resolve(false)?;
    let manifest = parse_manifest(&args.manifest)?;
    let classes = manifest.class_indices()?;

    let mask = build_filter_bank(&resolved.spec)?;
    let dim = mask.dim();

    // Every frame of an utterance carries that utterance's class.
    let mut flat: Vec<f64> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    let mut feature_paths = Vec::with_capacity(manifest.len());
    for (row, &class) in manifest.rows.iter().zip(&classes) {
        let utt = row.utt_id();
        let path = args.features.join(format!("{utt}.fbf1"));
        let features = read_features(&path).map_err(|e| e.for_utterance(&utt))?;
        if features.kind != FeatureKind::Power {
            bail!(
                "{}: expected power spectra from `extract --mode power`, found {:?}",
                path.display(),
                features.kind
            );
        }
        if features.dim() != dim {
            bail!(
                "{}: frames have {} bins but the mask has {}",
                path.display(),
                features.dim(),
                dim
            );
        }
        flat.extend(features.data.iter().copied());
        labels.extend(std::iter::repeat(class).take(features.num_frames()));
        feature_paths.push(path);
    }
    if labels.is_empty() {
        bail!("no frames to train on; are the clips long enough for one frame?");
    }
    let inputs =
        Array2::from_shape_vec((labels.len(), dim), flat).context("stacking power frames")?;

    let cfg = TrainConfig {
        epochs: args.epochs,
        batch_size: args.batch_size,
        seed: args.seed,
        h2_nodes: args.h2,
        ..TrainConfig::default()
    };
    let trained = train_fbnn(&inputs, &labels, mask, &cfg)?;
    for (i, loss) in trained.epoch_losses.iter().enumerate() {
        println!("epoch {:>3}/{} loss {loss:.6}", i + 1, cfg.epochs);
    }
    save_fbnn_model(&args.out, &trained.model, &cfg, &trained.epoch_losses)?;

    let mut rec = RunRecord::new("train-fbnn");
    resolved.record(&mut rec, &args.bank);
    rec.arg("epochs", args.epochs);
    rec.arg("batch_size", args.batch_size);
    rec.arg("h2", args.h2);
    rec.seed(args.seed);
    rec.input("manifest", &args.manifest)?;
    rec.input_set("features", feature_paths.iter().map(|p| p.as_path()))?;
    rec.write_beside(&args.out)?;

    println!(
        "wrote {} ({}-{}-{}-{} network, {} frames)",
        args.out.display(),
        dim,
        trained.model.channels(),
        args.h2,
        trained.model.n_out(),
        labels.len()
    );
    Ok(())
}
