//! Class-conditional density fitting: pooled feature frames of one label.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Args;
use fbcc_core::cepstral::FeatureKind;
use fbcc_core::eval::ScoreLabel;
use fbcc_core::gmm::{train_gmm, GmmTrainConfig};
use fbcc_core::io::{parse_manifest, read_features, save_gmm_model};
use ndarray::Array2;

use crate::sidecar::RunRecord;

#[derive(Debug, Args)]
pub struct TrainGmmArgs {
    /// Manifest TSV listing the training utterances
    #[arg(long)]
    pub manifest: PathBuf,

    /// Directory of per-utterance feature files from extract
    #[arg(long)]
    pub features: PathBuf,

    /// Which labeled class to pool: human or spoof
    #[arg(long)]
    pub class: ScoreLabel,

    /// Mixture components
    #[arg(long, default_value_t = 512)]
    pub gmm_k: usize,

    /// EM iterations after initialization
    #[arg(long, default_value_t = 10)]
    pub em_iters: usize,

    /// RNG seed for k-means subsampling and re-seeds
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output model JSON
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &TrainGmmArgs) -> anyhow::Result<()> {
    let manifest = parse_manifest(&args.manifest)?;

    let mut flat: Vec<f64> = Vec::new();
    let mut frames = 0usize;
    let mut dim = 0usize;
    let mut feature_paths = Vec::new();
    for row in manifest.rows.iter().filter(|r| r.label == args.class) {
        let utt = row.utt_id();
        let path = args.features.join(format!("{utt}.fbf1"));
        let features = read_features(&path).map_err(|e| e.for_utterance(&utt))?;
        if features.kind == FeatureKind::Power {
            bail!(
                "{}: raw power spectra are network input, not classifier features; \
                 run extract without --mode power",
                path.display()
            );
        }
        if dim == 0 {
            dim = features.dim();
        } else if features.dim() != dim {
            bail!(
                "{}: {}-dimensional frames in a pool of {}-dimensional ones",
                path.display(),
                features.dim(),
                dim
            );
        }
        flat.extend(features.data.iter().copied());
        frames += features.num_frames();
        feature_paths.push(path);
    }
    if feature_paths.is_empty() {
        bail!("manifest has no {} utterances", args.class);
    }
    if frames == 0 {
        bail!("{} utterances contributed no frames", args.class);
    }
    let pooled = Array2::from_shape_vec((frames, dim), flat).context("pooling frames")?;

    let cfg = GmmTrainConfig {
        k: args.gmm_k,
        em_iters: args.em_iters,
        seed: args.seed,
        ..GmmTrainConfig::default()
    };
    let trained = train_gmm(&pooled, &cfg)?;
    for (i, ll) in trained.ll_trace.iter().enumerate() {
        if i == 0 {
            println!("init      log-likelihood {ll:.6}");
        } else {
            println!("iter {i:>4} log-likelihood {ll:.6}");
        }
    }
    if !trained.reseeds.is_empty() {
        println!("re-seeded {} collapsed component(s)", trained.reseeds.len());
    }
    save_gmm_model(&args.out, &trained.model, &cfg, &trained.ll_trace, &trained.reseeds)?;

    let mut rec = RunRecord::new("train-gmm");
    rec.arg("class", args.class);
    rec.arg("gmm_k", args.gmm_k);
    rec.arg("em_iters", args.em_iters);
    rec.seed(args.seed);
    rec.input("manifest", &args.manifest)?;
    rec.input_set("features", feature_paths.iter().map(|p| p.as_path()))?;
    rec.write_beside(&args.out)?;

    println!(
        "wrote {} ({} components over {} frames of dim {})",
        args.out.display(),
        args.gmm_k,
        frames,
        dim
    );
    Ok(())
}
