//! Manually designed spectral filter banks.
//!
//! Four bank families, all materialized as D x C matrices (D one-sided FFT
//! bins, C channels) sampled at the bin centers `k * sr / nfft`:
//!
//! 1. triangular: peak-1 triangles, centers equally spaced in Hz
//! 2. rectangular: boxes of ones partitioning the band into equal widths
//! 3. gammatone: 4th-order magnitude responses with centers equally spaced
//!    on the ERB-number scale (dense at low frequency)
//! 4. inverted gammatone: the same channels with centers mirrored about the
//!    band midpoint (dense at high frequency)
//!
//! The matrices serve both as fixed feature extractors and as band-limiting
//! masks for the trainable filter-bank layer.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Equivalent rectangular bandwidth at center frequency `fc` (Hz):
/// `24.7 * (4.37 * fc / 1000 + 1)`.
pub fn erb_bandwidth(fc: f64) -> Result<f64> {
    if !fc.is_finite() || fc < 0.0 {
        return Err(Error::Domain(format!(
            "ERB bandwidth needs fc >= 0, got {fc}"
        )));
    }
    Ok(24.7 * (4.37 * fc / 1000.0 + 1.0))
}

/// ERB-number (ERB-rate) of a frequency: `21.4 * log10(1 + 0.00437 f)`.
pub fn erb_number(f: f64) -> f64 {
    21.4 * (1.0 + 0.00437 * f).log10()
}

/// Inverse of [`erb_number`].
pub fn erb_number_inv(e: f64) -> f64 {
    (10f64.powf(e / 21.4) - 1.0) / 0.00437
}

/// The four bank families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BankKind {
    Triangular,
    Rectangular,
    Gammatone,
    InvertedGammatone,
}

impl fmt::Display for BankKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BankKind::Triangular => "triangular",
            BankKind::Rectangular => "rectangular",
            BankKind::Gammatone => "gammatone",
            BankKind::InvertedGammatone => "inverted_gammatone",
        };
        f.write_str(s)
    }
}

impl FromStr for BankKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "triangular" => Ok(BankKind::Triangular),
            "rectangular" => Ok(BankKind::Rectangular),
            "gammatone" => Ok(BankKind::Gammatone),
            "inverted_gammatone" => Ok(BankKind::InvertedGammatone),
            other => Err(Error::Config(format!(
                "unknown bank kind {other:?} (expected triangular, rectangular, \
                 gammatone or inverted_gammatone)"
            ))),
        }
    }
}

/// Parameters that fully determine a designed bank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankSpec {
    pub kind: BankKind,
    pub channels: usize,
    pub nfft: usize,
    pub sample_rate: u32,
    /// Lower band edge in Hz.
    pub f_low: f64,
    /// Upper band edge in Hz, at most Nyquist.
    pub f_high: f64,
}

impl BankSpec {
    /// Spec with the conventional band edges: the full band from 0 Hz for
    /// triangular and rectangular banks, from 20 Hz for the gammatone pair
    /// (a 0 Hz gammatone center is degenerate). Upper edge is Nyquist.
    pub fn with_default_band(kind: BankKind, channels: usize, nfft: usize, sample_rate: u32) -> Self {
        let f_low = match kind {
            BankKind::Triangular | BankKind::Rectangular => 0.0,
            BankKind::Gammatone | BankKind::InvertedGammatone => 20.0,
        };
        BankSpec {
            kind,
            channels,
            nfft,
            sample_rate,
            f_low,
            f_high: sample_rate as f64 / 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels == 0 {
            return Err(Error::Config("bank needs at least one channel".into()));
        }
        if !self.nfft.is_power_of_two() {
            return Err(Error::Config(format!(
                "FFT size must be a power of two, got {}",
                self.nfft
            )));
        }
        if self.sample_rate == 0 {
            return Err(Error::Config("sample rate must be positive".into()));
        }
        let nyquist = self.sample_rate as f64 / 2.0;
        if !(self.f_low >= 0.0 && self.f_low < self.f_high && self.f_high <= nyquist) {
            return Err(Error::Config(format!(
                "band edges must satisfy 0 <= f_low < f_high <= {nyquist} Hz, \
                 got [{}, {}]",
                self.f_low, self.f_high
            )));
        }
        Ok(())
    }
}

/// Where a bank matrix came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BankOrigin {
    /// Built by [`build_filter_bank`] from a spec.
    Designed(BankSpec),
    /// Extracted from a trained network or parsed from a CSV file.
    Learned,
}

/// A D x C bank of non-negative channel responses over one-sided FFT bins.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBankMatrix {
    /// Row per spectral bin, column per channel; entries in [0, 1].
    pub weights: Array2<f64>,
    pub sample_rate: u32,
    pub origin: BankOrigin,
}

impl FilterBankMatrix {
    /// Number of spectral bins D.
    pub fn dim(&self) -> usize {
        self.weights.nrows()
    }

    /// Number of channels C.
    pub fn channels(&self) -> usize {
        self.weights.ncols()
    }

    /// FFT size implied by the row count: `2 * (D - 1)`.
    pub fn nfft(&self) -> usize {
        2 * (self.dim() - 1)
    }

    /// Center frequency of spectral bin `k` in Hz.
    pub fn bin_hz(&self, k: usize) -> f64 {
        k as f64 * self.sample_rate as f64 / self.nfft() as f64
    }

    /// Index of the largest entry in each column (first one on ties).
    pub fn peak_bins(&self) -> Vec<usize> {
        self.weights
            .columns()
            .into_iter()
            .map(|col| {
                let mut best = 0usize;
                for (k, &w) in col.iter().enumerate() {
                    if w > col[best] {
                        best = k;
                    }
                }
                best
            })
            .collect()
    }

    /// Check the structural invariants: entries in [0, 1], no empty channel,
    /// and each channel supported on one contiguous run of bins.
    pub fn validate(&self) -> Result<()> {
        if self.dim() < 2 {
            return Err(Error::Config(
                "bank must cover at least two spectral bins".into(),
            ));
        }
        for (c, col) in self.weights.columns().into_iter().enumerate() {
            let mut first = None;
            let mut last = None;
            for (k, &w) in col.iter().enumerate() {
                if !w.is_finite() || w < 0.0 || w > 1.0 {
                    return Err(Error::Config(format!(
                        "channel {c} bin {k} has weight {w}, outside [0, 1]"
                    )));
                }
                if w > 0.0 {
                    if first.is_none() {
                        first = Some(k);
                    }
                    last = Some(k);
                }
            }
            let (first, last) = match (first, last) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(Error::Config(format!(
                        "channel {c} has no nonzero response"
                    )))
                }
            };
            for k in first..=last {
                if col[k] == 0.0 {
                    return Err(Error::Config(format!(
                        "channel {c} support has a gap at bin {k}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Project per-frame power spectra (T x D) through the bank, giving
    /// T x C filter-bank energies.
    pub fn apply(&self, power: &Array2<f64>) -> Result<Array2<f64>> {
        if power.ncols() != self.dim() {
            return Err(Error::DimMismatch(format!(
                "power spectra have {} bins but the bank expects {}",
                power.ncols(),
                self.dim()
            )));
        }
        Ok(power.dot(&self.weights))
    }
}

/// Build one of the four designed banks. See the module docs for shapes.
pub fn build_filter_bank(spec: &BankSpec) -> Result<FilterBankMatrix> {
    spec.validate()?;
    let weights = match spec.kind {
        BankKind::Triangular => triangular_weights(spec)?,
        BankKind::Rectangular => rectangular_weights(spec)?,
        BankKind::Gammatone => gammatone_weights(spec, false),
        BankKind::InvertedGammatone => gammatone_weights(spec, true),
    };
    let bank = FilterBankMatrix {
        weights,
        sample_rate: spec.sample_rate,
        origin: BankOrigin::Designed(spec.clone()),
    };
    bank.validate()?;
    Ok(bank)
}

fn hz_to_bin(f: f64, spec: &BankSpec) -> usize {
    (f * spec.nfft as f64 / spec.sample_rate as f64).round() as usize
}

/// Triangles with C + 2 equally spaced edge points snapped to FFT bins, so
/// each peak is exactly 1 and neighboring channels cross at weight 0.5.
fn triangular_weights(spec: &BankSpec) -> Result<Array2<f64>> {
    let c = spec.channels;
    let dim = spec.nfft / 2 + 1;
    let edges: Vec<usize> = (0..c + 2)
        .map(|i| {
            let f = spec.f_low + i as f64 * (spec.f_high - spec.f_low) / (c + 1) as f64;
            hz_to_bin(f, spec)
        })
        .collect();
    if edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!(
            "{c} triangular channels do not fit into {dim} bins: adjacent \
             centers snap to the same bin"
        )));
    }

    let mut weights = Array2::<f64>::zeros((dim, c));
    for ch in 0..c {
        let (lo, mid, hi) = (edges[ch], edges[ch + 1], edges[ch + 2]);
        for k in lo + 1..=mid {
            weights[[k, ch]] = (k - lo) as f64 / (mid - lo) as f64;
        }
        for k in mid + 1..hi {
            weights[[k, ch]] = (hi - k) as f64 / (hi - mid) as f64;
        }
    }
    Ok(weights)
}

/// Boxes of ones: bin k joins channel floor((f_k - f_low) / width), so the
/// channels partition the in-band bins exactly once.
fn rectangular_weights(spec: &BankSpec) -> Result<Array2<f64>> {
    let c = spec.channels;
    let dim = spec.nfft / 2 + 1;
    let width = (spec.f_high - spec.f_low) / c as f64;
    let mut weights = Array2::<f64>::zeros((dim, c));
    for k in 0..dim {
        let f = k as f64 * spec.sample_rate as f64 / spec.nfft as f64;
        if f < spec.f_low || f > spec.f_high {
            continue;
        }
        let ch = (((f - spec.f_low) / width) as usize).min(c - 1);
        weights[[k, ch]] = 1.0;
    }
    for ch in 0..c {
        if weights.column(ch).iter().all(|&w| w == 0.0) {
            return Err(Error::Config(format!(
                "{c} rectangular channels do not fit into {dim} bins: \
                 channel {ch} covers no bin"
            )));
        }
    }
    Ok(weights)
}

/// Center frequencies equally spaced on the ERB-number scale over
/// [f_low, f_high], endpoints included. A single channel sits at the
/// ERB-scale midpoint.
fn gammatone_centers(spec: &BankSpec) -> Vec<f64> {
    let e_lo = erb_number(spec.f_low);
    let e_hi = erb_number(spec.f_high);
    let c = spec.channels;
    if c == 1 {
        return vec![erb_number_inv(0.5 * (e_lo + e_hi))];
    }
    (0..c)
        .map(|i| erb_number_inv(e_lo + i as f64 * (e_hi - e_lo) / (c - 1) as f64))
        .collect()
}

/// 4th-order gammatone magnitude sampled at bin centers:
/// `[1 + ((f - fc) / b)^2]^(-2)` with `b = 1.019 * erb_bandwidth(fc)`,
/// peak-normalized per channel.
///
/// The inverted variant mirrors each center via `fc' = f_low + f_high - fc`
/// while keeping that channel's bandwidth, then reorders the channels so
/// center frequencies still ascend.
fn gammatone_weights(spec: &BankSpec, inverted: bool) -> Array2<f64> {
    let dim = spec.nfft / 2 + 1;
    let mut channels: Vec<(f64, f64)> = gammatone_centers(spec)
        .into_iter()
        .map(|fc| {
            let b = 1.019 * erb_bandwidth(fc).expect("validated band edges are non-negative");
            (fc, b)
        })
        .collect();
    if inverted {
        for (fc, _) in channels.iter_mut() {
            *fc = spec.f_low + spec.f_high - *fc;
        }
        channels.reverse();
    }

    let mut weights = Array2::<f64>::zeros((dim, channels.len()));
    for (ch, &(fc, b)) in channels.iter().enumerate() {
        let mut peak = 0.0f64;
        for k in 0..dim {
            let f = k as f64 * spec.sample_rate as f64 / spec.nfft as f64;
            let x = (f - fc) / b;
            let w = (1.0 + x * x).powi(-2);
            weights[[k, ch]] = w;
            peak = peak.max(w);
        }
        for k in 0..dim {
            weights[[k, ch]] /= peak;
        }
    }
    weights
}

/// Write a bank as CSV: header `bin_hz,ch_0,...,ch_{C-1}`, then one row per
/// spectral bin. Values use the shortest decimal form that parses back to
/// the identical f64.
pub fn export_bank_csv(bank: &FilterBankMatrix, path: &Path) -> Result<()> {
    bank.validate()?;
    let mut out = String::new();
    out.push_str("bin_hz");
    for c in 0..bank.channels() {
        out.push_str(&format!(",ch_{c}"));
    }
    out.push('\n');
    for k in 0..bank.dim() {
        out.push_str(&format!("{}", bank.bin_hz(k)));
        for c in 0..bank.channels() {
            out.push_str(&format!(",{}", bank.weights[[k, c]]));
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Parse a bank CSV written by [`export_bank_csv`]. The sample rate is
/// recovered from the bin frequency column; the origin is marked learned
/// because the CSV does not carry the design parameters.
pub fn read_bank_csv(path: &Path) -> Result<FilterBankMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, detail: String| Error::parse(path, line, detail);

    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.first() != Some(&"bin_hz") || cols.len() < 2 {
        return Err(parse_err(1, format!("bad header {header:?}")));
    }
    let c = cols.len() - 1;

    let mut bin_hz = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != c + 1 {
            return Err(parse_err(
                idx + 1,
                format!("expected {} fields, found {}", c + 1, fields.len()),
            ));
        }
        let mut parsed = Vec::with_capacity(c + 1);
        for f in &fields {
            let v: f64 = f
                .parse()
                .map_err(|e| parse_err(idx + 1, format!("bad number {f:?}: {e}")))?;
            parsed.push(v);
        }
        bin_hz.push(parsed[0]);
        rows.push(parsed[1..].to_vec());
    }

    let dim = rows.len();
    if dim < 2 {
        return Err(parse_err(1, "bank needs at least two bin rows".into()));
    }
    let nfft = 2 * (dim - 1);
    let sample_rate = (bin_hz[1] * nfft as f64).round();
    if !(sample_rate.is_finite() && sample_rate > 0.0 && sample_rate <= u32::MAX as f64) {
        return Err(parse_err(2, format!("bin spacing {} is not usable", bin_hz[1])));
    }
    let sample_rate = sample_rate as u32;
    for (k, &hz) in bin_hz.iter().enumerate() {
        let expect = k as f64 * sample_rate as f64 / nfft as f64;
        if (hz - expect).abs() > 1e-6 * sample_rate as f64 {
            return Err(parse_err(
                k + 2,
                format!("bin_hz {hz} does not sit on the FFT grid (expected {expect})"),
            ));
        }
    }

    let mut weights = Array2::<f64>::zeros((dim, c));
    for (k, row) in rows.iter().enumerate() {
        for (ch, &w) in row.iter().enumerate() {
            weights[[k, ch]] = w;
        }
    }
    let bank = FilterBankMatrix {
        weights,
        sample_rate,
        origin: BankOrigin::Learned,
    };
    bank.validate()?;
    Ok(bank)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: BankKind, channels: usize, nfft: usize) -> BankSpec {
        BankSpec::with_default_band(kind, channels, nfft, 16000)
    }

    #[test]
    fn erb_bandwidth_known_values() {
        assert!((erb_bandwidth(0.0).unwrap() - 24.7).abs() < 1e-12);
        assert!((erb_bandwidth(1000.0).unwrap() - 132.639).abs() < 1e-9);
        assert!(erb_bandwidth(-1.0).is_err());
        assert!(erb_bandwidth(f64::NAN).is_err());
    }

    #[test]
    fn erb_bandwidth_monotone() {
        let mut prev = erb_bandwidth(0.0).unwrap();
        for fc in (1..100).map(|i| i as f64 * 80.0) {
            let b = erb_bandwidth(fc).unwrap();
            assert!(b > prev, "ERB not increasing at fc={fc}");
            prev = b;
        }
    }

    #[test]
    fn erb_number_round_trip() {
        for f in [0.0, 20.0, 440.0, 1000.0, 8000.0] {
            let back = erb_number_inv(erb_number(f));
            assert!((back - f).abs() < 1e-9, "round trip {f} -> {back}");
        }
    }

    #[test]
    fn triangular_shape_and_peaks() {
        let bank = build_filter_bank(&spec(BankKind::Triangular, 5, 512)).unwrap();
        assert_eq!(bank.dim(), 257);
        assert_eq!(bank.channels(), 5);
        for (c, col) in bank.weights.columns().into_iter().enumerate() {
            let peak = col.iter().cloned().fold(f64::MIN, f64::max);
            assert_eq!(peak, 1.0, "channel {c} peak is {peak}");
            // Unimodal: never rises again after the first descent.
            let mut descended = false;
            for w in col.windows(2) {
                if w[1] < w[0] {
                    descended = true;
                }
                if descended {
                    assert!(w[1] <= w[0], "channel {c} rises after its peak");
                }
            }
        }
    }

    #[test]
    fn triangular_neighbors_sum_to_one_between_centers() {
        let bank = build_filter_bank(&spec(BankKind::Triangular, 20, 512)).unwrap();
        let peaks = bank.peak_bins();
        for c in 0..bank.channels() - 1 {
            for k in peaks[c]..=peaks[c + 1] {
                let s = bank.weights[[k, c]] + bank.weights[[k, c + 1]];
                assert!(
                    (s - 1.0).abs() < 1e-9,
                    "bins between centers {c} and {} sum to {s}",
                    c + 1
                );
            }
        }
    }

    #[test]
    fn triangular_rejects_too_many_channels() {
        assert!(build_filter_bank(&spec(BankKind::Triangular, 300, 512)).is_err());
    }

    #[test]
    fn rectangular_partitions_the_band() {
        let bank = build_filter_bank(&spec(BankKind::Rectangular, 2, 512)).unwrap();
        for k in 0..bank.dim() {
            let row_sum: f64 = bank.weights.row(k).sum();
            assert_eq!(row_sum, 1.0, "bin {k} covered {row_sum} times");
        }
        // Two contiguous runs of ones.
        for col in bank.weights.columns() {
            let first = col.iter().position(|&w| w == 1.0).unwrap();
            let last = col.iter().rposition(|&w| w == 1.0).unwrap();
            assert!(col.iter().skip(first).take(last - first + 1).all(|&w| w == 1.0));
        }
    }

    #[test]
    fn rectangular_partition_various_channel_counts() {
        for c in [1, 3, 7, 20, 64] {
            let bank = build_filter_bank(&spec(BankKind::Rectangular, c, 512)).unwrap();
            for k in 0..bank.dim() {
                assert_eq!(bank.weights.row(k).sum(), 1.0, "C={c}, bin {k}");
            }
        }
    }

    #[test]
    fn gammatone_peaks_ascend() {
        let bank = build_filter_bank(&spec(BankKind::Gammatone, 128, 1024)).unwrap();
        assert_eq!(bank.dim(), 513);
        let peaks = bank.peak_bins();
        for w in peaks.windows(2) {
            assert!(w[0] <= w[1], "peak bins not non-decreasing: {peaks:?}");
        }
        for col in bank.weights.columns() {
            let peak = col.iter().cloned().fold(f64::MIN, f64::max);
            assert_eq!(peak, 1.0);
        }
    }

    #[test]
    fn gammatone_peak_sits_at_center_frequency() {
        let s = spec(BankKind::Gammatone, 32, 1024);
        let bank = build_filter_bank(&s).unwrap();
        let centers = gammatone_centers(&s);
        let step = s.sample_rate as f64 / s.nfft as f64;
        for (c, peak) in bank.peak_bins().into_iter().enumerate() {
            let peak_hz = peak as f64 * step;
            assert!(
                (peak_hz - centers[c]).abs() <= step / 2.0 + 1e-9,
                "channel {c}: peak at {peak_hz} Hz, center {} Hz",
                centers[c]
            );
        }
    }

    #[test]
    fn inverted_gammatone_mirrors_centers() {
        let s = spec(BankKind::Gammatone, 128, 1024);
        let inv = build_filter_bank(&spec(BankKind::InvertedGammatone, 128, 1024)).unwrap();
        let centers = gammatone_centers(&s);
        let step = s.sample_rate as f64 / s.nfft as f64;

        let inv_peaks = inv.peak_bins();
        for w in inv_peaks.windows(2) {
            assert!(w[0] <= w[1], "inverted peaks not ascending: {inv_peaks:?}");
        }
        // Channel j of the inverted bank mirrors gammatone channel C-1-j.
        let c = centers.len();
        for j in 0..c {
            let mirrored = s.f_low + s.f_high - centers[c - 1 - j];
            let peak_hz = inv_peaks[j] as f64 * step;
            assert!(
                (peak_hz - mirrored).abs() <= step / 2.0 + 1e-9,
                "channel {j}: peak {peak_hz} Hz vs mirrored center {mirrored} Hz"
            );
        }
        // Dense at high frequency: the top quarter of channels spans fewer
        // bins than the bottom quarter.
        let q = c / 4;
        let low_span = inv_peaks[q] - inv_peaks[0];
        let high_span = inv_peaks[c - 1] - inv_peaks[c - 1 - q];
        assert!(
            high_span < low_span,
            "expected dense high-frequency channels (low span {low_span}, high span {high_span})"
        );
    }

    #[test]
    fn all_kinds_stay_in_unit_interval_and_validate() {
        for kind in [
            BankKind::Triangular,
            BankKind::Rectangular,
            BankKind::Gammatone,
            BankKind::InvertedGammatone,
        ] {
            let bank = build_filter_bank(&spec(kind, 20, 512)).unwrap();
            bank.validate().unwrap();
            assert!(
                bank.weights.iter().all(|&w| (0.0..=1.0).contains(&w)),
                "{kind} has out-of-range weights"
            );
        }
    }

    #[test]
    fn validate_rejects_gaps_and_empty_channels() {
        let mut bank = build_filter_bank(&spec(BankKind::Triangular, 5, 512)).unwrap();
        let peaks = bank.peak_bins();
        bank.weights[[peaks[2], 2]] = 0.0;
        assert!(bank.validate().is_err(), "support gap not caught");

        let mut bank = build_filter_bank(&spec(BankKind::Triangular, 5, 512)).unwrap();
        for k in 0..bank.dim() {
            bank.weights[[k, 1]] = 0.0;
        }
        assert!(bank.validate().is_err(), "empty channel not caught");
    }

    #[test]
    fn apply_projects_dimensions() {
        let bank = build_filter_bank(&spec(BankKind::Triangular, 20, 512)).unwrap();
        let power = Array2::<f64>::ones((3, 257));
        let out = bank.apply(&power).unwrap();
        assert_eq!(out.shape(), &[3, 20]);
        // Each output is the column sum of the bank for an all-ones spectrum.
        for c in 0..20 {
            let col_sum: f64 = bank.weights.column(c).sum();
            assert!((out[[0, c]] - col_sum).abs() < 1e-12);
        }
        assert!(bank.apply(&Array2::<f64>::ones((3, 100))).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bank.csv");
        let bank = build_filter_bank(&spec(BankKind::Gammatone, 20, 512)).unwrap();
        export_bank_csv(&bank, &path).unwrap();

        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 258, "header plus one line per bin");
        assert!(text.starts_with("bin_hz,ch_0,"));

        let back = read_bank_csv(&path).unwrap();
        assert_eq!(back.sample_rate, 16000);
        assert_eq!(back.weights.shape(), bank.weights.shape());
        for (a, b) in back.weights.iter().zip(bank.weights.iter()) {
            assert_eq!(a, b, "CSV round trip changed a weight");
        }
    }

    #[test]
    fn export_rejects_invalid_bank() {
        let dir = tempfile::tempdir().unwrap();
        let mut bank = build_filter_bank(&spec(BankKind::Triangular, 5, 512)).unwrap();
        for k in 0..bank.dim() {
            bank.weights[[k, 0]] = 0.0;
        }
        assert!(export_bank_csv(&bank, &dir.path().join("bad.csv")).is_err());
    }

    #[test]
    fn spec_validation_rejects_bad_bands() {
        let mut s = spec(BankKind::Triangular, 5, 512);
        s.f_high = 9000.0;
        assert!(s.validate().is_err(), "f_high above Nyquist accepted");
        let mut s = spec(BankKind::Triangular, 5, 512);
        s.f_low = s.f_high;
        assert!(s.validate().is_err(), "empty band accepted");
        let mut s = spec(BankKind::Triangular, 5, 512);
        s.nfft = 500;
        assert!(s.validate().is_err(), "non power-of-two FFT accepted");
    }
}
