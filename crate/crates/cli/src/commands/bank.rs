//! Bank design and export: `make-bank` and `export-learned-bank`.

use std::path::PathBuf;

use clap::Args;
use fbcc_core::filterbank::{build_filter_bank, export_bank_csv};
use fbcc_core::io::load_fbnn_model;

use crate::opts::BankOpts;
use crate::sidecar::RunRecord;

#[derive(Debug, Args)]
pub struct MakeBankArgs {
    #[command(flatten)]
    pub bank: BankOpts,

    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
}

pub fn make_bank(args: &MakeBankArgs) -> anyhow::Result<()> {
    let resolved = args.bank.resolve(false)?;
    let bank = build_filter_bank(&resolved.spec)?;
    export_bank_csv(&bank, &args.out)?;

    let mut rec = RunRecord::new("make-bank");
    resolved.record(&mut rec, &args.bank);
    rec.write_beside(&args.out)?;

    println!(
        "wrote {} ({} bins x {} channels)",
        args.out.display(),
        bank.dim(),
        bank.channels()
    );
    Ok(())
}

#[derive(Debug, Args)]
pub struct ExportLearnedBankArgs {
    /// Trained network model JSON from train-fbnn
    #[arg(long)]
    pub model: PathBuf,

    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
}

pub fn export_learned_bank(args: &ExportLearnedBankArgs) -> anyhow::Result<()> {
    let (model, _, _) = load_fbnn_model(&args.model)?;
    let bank = model.effective_filter_bank();
    export_bank_csv(&bank, &args.out)?;

    let mut rec = RunRecord::new("export-learned-bank");
    rec.input("model", &args.model)?;
    rec.write_beside(&args.out)?;

    println!(
        "wrote {} ({} bins x {} channels)",
        args.out.display(),
        bank.dim(),
        bank.channels()
    );
    Ok(())
}
