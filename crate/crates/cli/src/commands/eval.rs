//! Score-file evaluation: per-attack EERs and group averages.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use fbcc_core::eval::{aggregate_report, EvalReport};
use fbcc_core::io::read_scores;

use crate::sidecar::RunRecord;

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Score TSV from the score subcommand
    #[arg(long)]
    pub scores: PathBuf,

    /// Comma-separated ids of attacks also present in training
    #[arg(long, value_delimiter = ',')]
    pub known: Vec<String>,

    /// Comma-separated ids of attacks held out of training
    #[arg(long, value_delimiter = ',')]
    pub unknown: Vec<String>,

    /// Additionally pool every unknown-attack trial into one EER
    #[arg(long)]
    pub pool_unknown: bool,

    /// Report JSON path; defaults to the score file with a .report.json suffix
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn default_report_path(scores: &Path) -> PathBuf {
    scores.with_extension("report.json")
}

pub fn run(args: &EvalArgs) -> anyhow::Result<()> {
    let scores = read_scores(&args.scores)?;
    let known: BTreeSet<String> = args.known.iter().cloned().collect();
    let unknown: BTreeSet<String> = args.unknown.iter().cloned().collect();
    let report = aggregate_report(&scores, &known, &unknown, args.pool_unknown)?;

    print!("{}", report.render_table());

    let out = args
        .out
        .clone()
        .unwrap_or_else(|| default_report_path(&args.scores));
    write_report(&out, &report)?;

    let mut rec = RunRecord::new("eval");
    rec.arg("known", args.known.join(","));
    rec.arg("unknown", args.unknown.join(","));
    rec.arg("pool_unknown", args.pool_unknown);
    rec.input("scores", &args.scores)?;
    rec.write_beside(&out)?;

    println!("wrote {}", out.display());
    Ok(())
}

fn write_report(path: &Path, report: &EvalReport) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(report).context("encoding report")?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_path_defaults_next_to_the_scores() {
        assert_eq!(
            default_report_path(Path::new("/tmp/s.tsv")),
            Path::new("/tmp/s.report.json")
        );
        assert_eq!(
            default_report_path(Path::new("scores")),
            Path::new("scores.report.json")
        );
    }
}
