//! Bank-geometry flags shared by the design, extraction and training
//! subcommands, and their resolution against the preset table.

use anyhow::bail;
use clap::Args;
use fbcc_core::filterbank::{BankKind, BankSpec};

use crate::presets::{self, Preset};
use crate::sidecar::RunRecord;

/// Flags that pin down a bank design. A preset supplies every value; explicit
/// flags fill in the rest or override preset values.
#[derive(Debug, Clone, Args)]
pub struct BankOpts {
    /// Named recipe: lfcc, rfcc, gfcc, igfcc, or a dnn- variant of those
    #[arg(long)]
    pub preset: Option<String>,

    /// Bank family: triangular, rectangular, gammatone or inverted_gammatone
    #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
    pub kind: Option<BankKind>,

    /// FFT length, a power of two
    #[arg(long, required_unless_present = "preset")]
    pub nfft: Option<usize>,

    /// Number of bank channels
    #[arg(long, required_unless_present = "preset")]
    pub channels: Option<usize>,

    /// Cepstral coefficients kept after the DCT, 0th included
    #[arg(long)]
    pub coeffs: Option<usize>,

    /// Sample rate in Hz the bank is designed for
    #[arg(long, default_value_t = 16_000)]
    pub sample_rate: u32,

    /// Lower band edge in Hz (family-dependent default when omitted)
    #[arg(long)]
    pub f_low: Option<f64>,

    /// Upper band edge in Hz (Nyquist when omitted)
    #[arg(long)]
    pub f_high: Option<f64>,
}

/// A fully determined design plus the coefficient count, when one is needed.
#[derive(Debug, Clone)]
pub struct ResolvedBank {
    pub spec: BankSpec,
    pub coeffs: Option<usize>,
    /// The chosen preset expects a bank learned by `train-fbnn`.
    pub learned: bool,
}

impl BankOpts {
    pub fn resolve(&self, needs_coeffs: bool) -> anyhow::Result<ResolvedBank> {
        let preset: Option<&Preset> = match self.preset.as_deref() {
            Some(name) => Some(presets::find(name)?),
            None => None,
        };
        // clap already rejects a missing --kind/--nfft/--channels when no
        // preset is given; the bails keep resolve safe to call directly.
        let Some(kind) = self.kind.or(preset.map(|p| p.kind)) else {
            bail!("--kind is required when no --preset is given");
        };
        let Some(nfft) = self.nfft.or(preset.map(|p| p.nfft)) else {
            bail!("--nfft is required when no --preset is given");
        };
        let Some(channels) = self.channels.or(preset.map(|p| p.channels)) else {
            bail!("--channels is required when no --preset is given");
        };
        let coeffs = self.coeffs.or(preset.map(|p| p.coeffs));
        if needs_coeffs && coeffs.is_none() {
            bail!("--coeffs is required when no --preset is given");
        }

        let mut spec = BankSpec::with_default_band(kind, channels, nfft, self.sample_rate);
        if let Some(f) = self.f_low {
            spec.f_low = f;
        }
        if let Some(f) = self.f_high {
            spec.f_high = f;
        }
        spec.validate()?;
        Ok(ResolvedBank {
            spec,
            coeffs,
            learned: preset.is_some_and(|p| p.learned),
        })
    }
}

impl ResolvedBank {
    /// Record the effective design in a sidecar, defaults included.
    pub fn record(&self, rec: &mut RunRecord, opts: &BankOpts) {
        if let Some(name) = &opts.preset {
            rec.arg("preset", name);
        }
        rec.arg("kind", self.spec.kind);
        rec.arg("nfft", self.spec.nfft);
        rec.arg("channels", self.spec.channels);
        if let Some(m) = self.coeffs {
            rec.arg("coeffs", m);
        }
        rec.arg("sample_rate", self.spec.sample_rate);
        rec.arg("f_low", self.spec.f_low);
        rec.arg("f_high", self.spec.f_high);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> BankOpts {
        BankOpts {
            preset: None,
            kind: None,
            nfft: None,
            channels: None,
            coeffs: None,
            sample_rate: 16_000,
            f_low: None,
            f_high: None,
        }
    }

    #[test]
    fn preset_fills_everything() {
        let mut o = opts();
        o.preset = Some("gfcc".into());
        let r = o.resolve(true).unwrap();
        assert_eq!(r.spec.kind, BankKind::Gammatone);
        assert_eq!(r.spec.nfft, 1024);
        assert_eq!(r.spec.channels, 128);
        assert_eq!(r.coeffs, Some(20));
        assert!(!r.learned);
        assert_eq!(r.spec.f_low, 20.0);
        assert_eq!(r.spec.f_high, 8000.0);
    }

    #[test]
    fn flags_override_the_preset() {
        let mut o = opts();
        o.preset = Some("dnn-lfcc".into());
        o.nfft = Some(256);
        o.channels = Some(10);
        o.coeffs = Some(8);
        let r = o.resolve(true).unwrap();
        assert_eq!(r.spec.nfft, 256);
        assert_eq!(r.spec.channels, 10);
        assert_eq!(r.coeffs, Some(8));
        assert!(r.learned);
    }

    #[test]
    fn explicit_design_without_preset() {
        let mut o = opts();
        o.kind = Some(BankKind::Triangular);
        o.nfft = Some(512);
        o.channels = Some(20);
        let r = o.resolve(false).unwrap();
        assert_eq!(r.coeffs, None);
        assert!(!r.learned);

        // The same design needs --coeffs once cepstra are requested.
        let err = o.resolve(true).unwrap_err().to_string();
        assert!(err.contains("--coeffs"), "{err}");
    }

    #[test]
    fn band_edges_are_validated() {
        let mut o = opts();
        o.preset = Some("lfcc".into());
        o.f_high = Some(9000.0); // beyond Nyquist at 16 kHz
        assert!(o.resolve(true).is_err());
    }

    #[test]
    fn unknown_preset_is_rejected() {
        let mut o = opts();
        o.preset = Some("plp".into());
        let err = o.resolve(false).unwrap_err().to_string();
        assert!(err.contains("unknown preset"), "{err}");
    }
}
