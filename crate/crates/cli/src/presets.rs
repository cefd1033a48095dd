//! Named extraction recipes.
//!
//! Each preset pins the FFT size, channel count, coefficient count and bank
//! family for one feature type. The `dnn-` variants use the same geometry but
//! expect the bank to come out of `train-fbnn` instead of being designed.

use anyhow::anyhow;
use fbcc_core::filterbank::BankKind;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub kind: BankKind,
    pub nfft: usize,
    pub channels: usize,
    pub coeffs: usize,
    /// The bank is produced by network training rather than designed.
    pub learned: bool,
}

pub const PRESETS: [Preset; 8] = [
    Preset { name: "lfcc", kind: BankKind::Triangular, nfft: 512, channels: 20, coeffs: 20, learned: false },
    Preset { name: "rfcc", kind: BankKind::Rectangular, nfft: 512, channels: 20, coeffs: 20, learned: false },
    Preset { name: "gfcc", kind: BankKind::Gammatone, nfft: 1024, channels: 128, coeffs: 20, learned: false },
    Preset { name: "igfcc", kind: BankKind::InvertedGammatone, nfft: 1024, channels: 128, coeffs: 20, learned: false },
    Preset { name: "dnn-lfcc", kind: BankKind::Triangular, nfft: 512, channels: 20, coeffs: 20, learned: true },
    Preset { name: "dnn-rfcc", kind: BankKind::Rectangular, nfft: 512, channels: 20, coeffs: 20, learned: true },
    Preset { name: "dnn-gfcc", kind: BankKind::Gammatone, nfft: 1024, channels: 128, coeffs: 20, learned: true },
    Preset { name: "dnn-igfcc", kind: BankKind::InvertedGammatone, nfft: 1024, channels: 128, coeffs: 20, learned: true },
];

pub fn find(name: &str) -> anyhow::Result<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name).ok_or_else(|| {
        let known: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
        anyhow!("unknown preset {name:?} (expected one of {})", known.join(", "))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_table_is_stable() {
        // (name, kind, nfft, channels, coeffs, learned). The geometry pairs
        // are fixed per bank family: 512/20 for the triangular and
        // rectangular recipes, 1024/128 for the gammatone pair.
        let expected: [(&str, BankKind, usize, usize, usize, bool); 8] = [
            ("lfcc", BankKind::Triangular, 512, 20, 20, false),
            ("rfcc", BankKind::Rectangular, 512, 20, 20, false),
            ("gfcc", BankKind::Gammatone, 1024, 128, 20, false),
            ("igfcc", BankKind::InvertedGammatone, 1024, 128, 20, false),
            ("dnn-lfcc", BankKind::Triangular, 512, 20, 20, true),
            ("dnn-rfcc", BankKind::Rectangular, 512, 20, 20, true),
            ("dnn-gfcc", BankKind::Gammatone, 1024, 128, 20, true),
            ("dnn-igfcc", BankKind::InvertedGammatone, 1024, 128, 20, true),
        ];
        assert_eq!(PRESETS.len(), expected.len());
        for (preset, want) in PRESETS.iter().zip(expected) {
            assert_eq!(
                (preset.name, preset.kind, preset.nfft, preset.channels, preset.coeffs, preset.learned),
                want
            );
        }
    }

    #[test]
    fn lookup_finds_every_preset_and_rejects_others() {
        for p in &PRESETS {
            assert_eq!(find(p.name).unwrap().name, p.name);
        }
        let err = find("mfcc").unwrap_err().to_string();
        assert!(err.contains("unknown preset"), "{err}");
        assert!(err.contains("dnn-igfcc"), "{err}");
    }
}
