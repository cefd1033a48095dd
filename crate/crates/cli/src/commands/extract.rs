//! Batch feature extraction: one FBF1 file per manifest row.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use fbcc_core::audio::read_wav_mono16;
use fbcc_core::cepstral::{extract_utterance, power_features, CepstralConfig, PipelineConfig};
use fbcc_core::filterbank::{build_filter_bank, read_bank_csv, FilterBankMatrix};
use fbcc_core::io::{parse_manifest, write_features};

use crate::opts::{BankOpts, ResolvedBank};
use crate::sidecar::RunRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExtractMode {
    /// Cepstra with delta and delta-delta appended, the classifier input
    Features,
    /// Raw per-frame power spectra, the network's training input
    Power,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Manifest TSV: audio path, label, attack id, optional class index
    #[arg(long)]
    pub manifest: PathBuf,

    #[command(flatten)]
    pub bank: BankOpts,

    /// Learned-bank CSV that replaces the designed bank
    #[arg(long = "bank")]
    pub bank_file: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = ExtractMode::Features)]
    pub mode: ExtractMode,

    /// Directory for the per-utterance .fbf1 files
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn pick_bank(args: &ExtractArgs, resolved: &ResolvedBank) -> anyhow::Result<FilterBankMatrix> {
    let Some(path) = &args.bank_file else {
        if resolved.learned && args.mode == ExtractMode::Features {
            bail!(
                "preset {} expects a bank learned by train-fbnn; pass it with --bank",
                args.bank.preset.as_deref().unwrap_or("?")
            );
        }
        return Ok(build_filter_bank(&resolved.spec)?);
    };
    let bank = read_bank_csv(path)?;
    if bank.nfft() != resolved.spec.nfft || bank.channels() != resolved.spec.channels {
        bail!(
            "{}: bank is nfft {} x {} channels but the design asks for nfft {} x {} channels",
            path.display(),
            bank.nfft(),
            bank.channels(),
            resolved.spec.nfft,
            resolved.spec.channels
        );
    }
    if bank.sample_rate != resolved.spec.sample_rate {
        bail!(
            "{}: bank was built for {} Hz, expected {} Hz",
            path.display(),
            bank.sample_rate,
            resolved.spec.sample_rate
        );
    }
    Ok(bank)
}

pub fn run(args: &ExtractArgs) -> anyhow::Result<()> {
    let resolved = args.bank.resolve(args.mode == ExtractMode::Features)?;
    let manifest = parse_manifest(&args.manifest)?;
    if manifest.is_empty() {
        bail!("manifest {} lists no utterances", args.manifest.display());
    }

    let bank = pick_bank(args, &resolved)?;
    // Power mode never applies the bank; the channel count still serves as a
    // valid coefficient placeholder so one config covers both modes.
    let coeffs = resolved.coeffs.unwrap_or_else(|| bank.channels());
    let cfg = PipelineConfig::new(resolved.spec.nfft, CepstralConfig::new(bank, coeffs));
    cfg.validate()?;

    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;

    for row in &manifest.rows {
        let utt = row.utt_id();
        let audio = read_wav_mono16(&row.audio_path).map_err(|e| e.for_utterance(&utt))?;
        let features = match args.mode {
            ExtractMode::Features => extract_utterance(&audio, &cfg),
            ExtractMode::Power => power_features(&audio, &cfg),
        }
        .map_err(|e| e.for_utterance(&utt))?;
        write_features(&args.out_dir.join(format!("{utt}.fbf1")), &features)?;
    }

    let mut rec = RunRecord::new("extract");
    resolved.record(&mut rec, &args.bank);
    rec.arg(
        "mode",
        match args.mode {
            ExtractMode::Features => "features",
            ExtractMode::Power => "power",
        },
    );
    rec.input("manifest", &args.manifest)?;
    rec.input_set("audio", manifest.rows.iter().map(|r| r.audio_path.as_path()))?;
    if let Some(path) = &args.bank_file {
        rec.input("bank", path)?;
    }
    rec.write(&args.out_dir.join("extract.run.json"))?;

    println!(
        "wrote {} feature files to {}",
        manifest.len(),
        args.out_dir.display()
    );
    Ok(())
}
