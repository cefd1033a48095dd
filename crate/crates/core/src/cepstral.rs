//! Cepstral features from per-frame power spectra.
//!
//! The chain is: project the power spectrum through a filter bank, compress
//! with a floored natural log, apply an orthonormal DCT-II, keep the first M
//! coefficients, then append first- and second-order regression deltas. Any
//! bank matrix works here, designed or learned, so the same code produces
//! LFCC/RFCC/GFCC/IGFCC style features and their learned-bank counterparts.

use ndarray::Array2;

use crate::audio::AudioBuffer;
use crate::dsp;
use crate::error::{Error, Result};
use crate::filterbank::FilterBankMatrix;

/// What the rows of a [`FeatureMatrix`] hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    /// One-sided power spectra, D = nfft/2 + 1 per row.
    Power,
    /// Filter-bank energies, C per row.
    Fbank,
    /// Static cepstra, M per row.
    Cep,
    /// Delta features, 2M or 3M per row.
    CepDeltas,
}

impl FeatureKind {
    /// Byte tag used in the FBF1 feature file format.
    pub fn tag(self) -> u8 {
        match self {
            FeatureKind::Power => 0,
            FeatureKind::Fbank => 1,
            FeatureKind::Cep => 2,
            FeatureKind::CepDeltas => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(FeatureKind::Power),
            1 => Ok(FeatureKind::Fbank),
            2 => Ok(FeatureKind::Cep),
            3 => Ok(FeatureKind::CepDeltas),
            other => Err(Error::Config(format!("unknown feature kind tag {other}"))),
        }
    }
}

/// T x dim matrix of per-frame feature vectors, all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub data: Array2<f64>,
    pub kind: FeatureKind,
}

impl FeatureMatrix {
    pub fn new(data: Array2<f64>, kind: FeatureKind) -> Result<Self> {
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::Numeric {
                layer: "features",
                detail: format!("non-finite feature value {bad}"),
            });
        }
        Ok(FeatureMatrix { data, kind })
    }

    pub fn num_frames(&self) -> usize {
        self.data.nrows()
    }

    pub fn dim(&self) -> usize {
        self.data.ncols()
    }
}

/// Cepstral post-processing parameters.
#[derive(Debug, Clone)]
pub struct CepstralConfig {
    pub bank: FilterBankMatrix,
    /// Number of cepstral coefficients M kept after the DCT, 0th included.
    pub num_coeffs: usize,
    /// Filter-bank energies are clamped to at least this before the log.
    pub log_floor: f64,
    /// Regression half-window K for the delta operator.
    pub delta_window: usize,
    /// Keep the static coefficients alongside the deltas.
    pub include_static: bool,
}

impl CepstralConfig {
    pub fn new(bank: FilterBankMatrix, num_coeffs: usize) -> Self {
        CepstralConfig {
            bank,
            num_coeffs,
            log_floor: 1e-10,
            delta_window: 2,
            include_static: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=self.bank.channels()).contains(&self.num_coeffs) {
            return Err(Error::Config(format!(
                "need 1 <= num_coeffs <= {} channels, got {}",
                self.bank.channels(),
                self.num_coeffs
            )));
        }
        if !(self.log_floor > 0.0 && self.log_floor.is_finite()) {
            return Err(Error::Config(format!(
                "log floor must be positive, got {}",
                self.log_floor
            )));
        }
        if self.delta_window == 0 {
            return Err(Error::Config("delta window must be at least 1".into()));
        }
        Ok(())
    }

    /// Dimension of the final feature vectors: 2M, or 3M with statics kept.
    pub fn output_dim(&self) -> usize {
        if self.include_static {
            3 * self.num_coeffs
        } else {
            2 * self.num_coeffs
        }
    }
}

/// M x C orthonormal DCT-II matrix:
/// `row m, col c = s_m * cos(pi * m * (c + 0.5) / C)` with `s_0 = sqrt(1/C)`
/// and `s_m = sqrt(2/C)` otherwise.
pub fn dct_matrix(num_coeffs: usize, channels: usize) -> Array2<f64> {
    let c = channels as f64;
    let mut out = Array2::<f64>::zeros((num_coeffs, channels));
    for m in 0..num_coeffs {
        let scale = if m == 0 { (1.0 / c).sqrt() } else { (2.0 / c).sqrt() };
        for k in 0..channels {
            out[[m, k]] =
                scale * (std::f64::consts::PI * m as f64 * (k as f64 + 0.5) / c).cos();
        }
    }
    out
}

/// Floored log compression followed by the truncated orthonormal DCT-II,
/// mapping T x C filter-bank energies to T x M static cepstra.
pub fn log_dct(fbank: &Array2<f64>, num_coeffs: usize, log_floor: f64) -> Result<FeatureMatrix> {
    if num_coeffs > fbank.ncols() {
        return Err(Error::Config(format!(
            "cannot keep {num_coeffs} coefficients from {} channels",
            fbank.ncols()
        )));
    }
    let logged = fbank.mapv(|v| v.max(log_floor).ln());
    let dct = dct_matrix(num_coeffs, fbank.ncols());
    FeatureMatrix::new(logged.dot(&dct.t()), FeatureKind::Cep)
}

/// Static cepstra of per-frame power spectra (T x D rows).
pub fn cepstra(power: &Array2<f64>, cfg: &CepstralConfig) -> Result<FeatureMatrix> {
    cfg.validate()?;
    let fbank = cfg.bank.apply(power)?;
    log_dct(&fbank, cfg.num_coeffs, cfg.log_floor)
}

/// One pass of the regression delta operator with clamped edges:
/// `d_t = sum_k k * (x[t+k] - x[t-k]) / (2 * sum_k k^2)`, indices clamped
/// to [0, T-1].
fn delta_pass(x: &Array2<f64>, window: usize) -> Array2<f64> {
    let t_max = x.nrows();
    let denom: f64 = 2.0 * (1..=window).map(|k| (k * k) as f64).sum::<f64>();
    let mut out = Array2::<f64>::zeros(x.raw_dim());
    for t in 0..t_max {
        for k in 1..=window {
            let ahead = (t + k).min(t_max - 1);
            let behind = t.saturating_sub(k);
            for j in 0..x.ncols() {
                out[[t, j]] += k as f64 * (x[[ahead, j]] - x[[behind, j]]) / denom;
            }
        }
    }
    out
}

/// Append delta and delta-delta coefficients to static cepstra. The output
/// is `[delta, delta2]` (statics dropped) unless `include_static`, which
/// prepends them. An empty input stays empty at the output dimension.
pub fn append_deltas(cep: &FeatureMatrix, cfg: &CepstralConfig) -> Result<FeatureMatrix> {
    if cep.kind != FeatureKind::Cep {
        return Err(Error::Config(
            "delta operator expects static cepstra".into(),
        ));
    }
    let m = cep.dim();
    let out_dim = if cfg.include_static { 3 * m } else { 2 * m };
    let t = cep.num_frames();
    if t == 0 {
        return FeatureMatrix::new(Array2::zeros((0, out_dim)), FeatureKind::CepDeltas);
    }

    let d1 = delta_pass(&cep.data, cfg.delta_window);
    let d2 = delta_pass(&d1, cfg.delta_window);
    let mut out = Array2::<f64>::zeros((t, out_dim));
    for i in 0..t {
        let mut col = 0usize;
        if cfg.include_static {
            for j in 0..m {
                out[[i, col]] = cep.data[[i, j]];
                col += 1;
            }
        }
        for j in 0..m {
            out[[i, col]] = d1[[i, j]];
            col += 1;
        }
        for j in 0..m {
            out[[i, col]] = d2[[i, j]];
            col += 1;
        }
    }
    FeatureMatrix::new(out, FeatureKind::CepDeltas)
}

/// End-to-end extraction parameters: front end plus cepstral stage.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    /// Pre-emphasis coefficient, 0 disables.
    pub pre_emphasis: f64,
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub nfft: usize,
    pub cepstral: CepstralConfig,
}

impl PipelineConfig {
    /// Conventional front end: 0.97 pre-emphasis, 20 ms frames, 10 ms hop.
    pub fn new(nfft: usize, cepstral: CepstralConfig) -> Self {
        PipelineConfig {
            pre_emphasis: 0.97,
            frame_ms: 20.0,
            hop_ms: 10.0,
            nfft,
            cepstral,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.cepstral.validate()?;
        let dim = dsp::spectrum_dim(self.nfft);
        if dim != self.cepstral.bank.dim() {
            return Err(Error::Config(format!(
                "FFT size {} gives {dim} bins but the bank has {} rows",
                self.nfft,
                self.cepstral.bank.dim()
            )));
        }
        Ok(())
    }
}

/// Per-frame power spectra of one utterance (T x D), the front-end half of
/// [`extract_utterance`].
pub fn power_features(audio: &AudioBuffer, cfg: &PipelineConfig) -> Result<FeatureMatrix> {
    cfg.validate()?;
    if audio.sample_rate != cfg.cepstral.bank.sample_rate {
        return Err(Error::Config(format!(
            "audio is {} Hz but the bank was built for {} Hz",
            audio.sample_rate, cfg.cepstral.bank.sample_rate
        )));
    }
    let emphasized = dsp::pre_emphasize(audio, cfg.pre_emphasis)?;
    let frames = dsp::frame_and_window(&emphasized, cfg.frame_ms, cfg.hop_ms)?;
    let power = dsp::power_spectrogram(&frames, cfg.nfft)?;
    FeatureMatrix::new(power, FeatureKind::Power)
}

/// Full pipeline for one utterance: pre-emphasis, framing and windowing,
/// power spectra, filter bank, log-DCT, deltas. Deterministic.
pub fn extract_utterance(audio: &AudioBuffer, cfg: &PipelineConfig) -> Result<FeatureMatrix> {
    let power = power_features(audio, cfg)?;
    let cep = cepstra(&power.data, &cfg.cepstral)?;
    append_deltas(&cep, &cfg.cepstral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filterbank::{build_filter_bank, BankKind, BankSpec};
    use ndarray::Array2;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tfb(channels: usize, nfft: usize) -> FilterBankMatrix {
        build_filter_bank(&BankSpec::with_default_band(
            BankKind::Triangular,
            channels,
            nfft,
            16000,
        ))
        .unwrap()
    }

    #[test]
    fn dct_rows_are_orthonormal() {
        for c in [6usize, 20, 64, 256] {
            let d = dct_matrix(c, c);
            let gram = d.dot(&d.t());
            for i in 0..c {
                for j in 0..c {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (gram[[i, j]] - expect).abs() < 1e-10,
                        "C={c}: gram[{i},{j}] = {}",
                        gram[[i, j]]
                    );
                }
            }
        }
    }

    #[test]
    fn dct_matches_naive_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = 6usize;
        for _ in 0..50 {
            let row: Vec<f64> = (0..c).map(|_| rng.random_range(-3.0..3.0)).collect();
            let mut input = Array2::<f64>::zeros((1, c));
            for (j, &v) in row.iter().enumerate() {
                input[[0, j]] = v;
            }
            let fast = input.dot(&dct_matrix(c, c).t());
            for m in 0..c {
                // Definition, summed term by term.
                let scale = if m == 0 {
                    (1.0 / c as f64).sqrt()
                } else {
                    (2.0 / c as f64).sqrt()
                };
                let mut acc = 0.0;
                for (k, &v) in row.iter().enumerate() {
                    acc += v
                        * (std::f64::consts::PI * m as f64 * (k as f64 + 0.5) / c as f64).cos();
                }
                let naive = scale * acc;
                assert!(
                    (fast[[0, m]] - naive).abs() < 1e-10,
                    "coefficient {m}: {} vs {naive}",
                    fast[[0, m]]
                );
            }
        }
    }

    #[test]
    fn constant_fbank_excites_only_c0() {
        let c = 20usize;
        let v = std::f64::consts::E.powi(2);
        let fb = Array2::from_elem((1, c), v);
        let cep = log_dct(&fb, c, 1e-10).unwrap();
        let expect_c0 = (c as f64).sqrt() * v.ln();
        assert!(
            (cep.data[[0, 0]] - expect_c0).abs() < 1e-10,
            "c0 = {}, want {expect_c0}",
            cep.data[[0, 0]]
        );
        for m in 1..c {
            assert!(cep.data[[0, m]].abs() < 1e-10, "c{m} = {}", cep.data[[0, m]]);
        }
    }

    #[test]
    fn zero_frame_is_floored_to_finite_constant_cepstrum() {
        let bank = tfb(20, 512);
        let power = Array2::<f64>::zeros((1, 257));
        let cfg = CepstralConfig::new(bank, 20);
        let cep = cepstra(&power, &cfg).unwrap();
        let expect_c0 = (20f64).sqrt() * 1e-10f64.ln();
        assert!((cep.data[[0, 0]] - expect_c0).abs() < 1e-9);
        for m in 1..20 {
            assert!(cep.data[[0, m]].abs() < 1e-9);
        }
        assert!(cep.data.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn deltas_of_constant_sequence_vanish() {
        let bank = tfb(4, 512);
        let cfg = CepstralConfig::new(bank, 4);
        let cep = FeatureMatrix::new(Array2::from_elem((12, 4), 1.5), FeatureKind::Cep).unwrap();
        let out = append_deltas(&cep, &cfg).unwrap();
        assert_eq!(out.dim(), 8);
        assert!(out.data.iter().all(|&v| v.abs() < 1e-15));
    }

    #[test]
    fn deltas_of_linear_ramp() {
        let bank = tfb(3, 512);
        let cfg = CepstralConfig::new(bank, 3);
        let t = 30usize;
        let a = [0.7, -1.3, 2.0];
        let mut data = Array2::<f64>::zeros((t, 3));
        for i in 0..t {
            for (j, &slope) in a.iter().enumerate() {
                data[[i, j]] = slope * i as f64;
            }
        }
        let cep = FeatureMatrix::new(data, FeatureKind::Cep).unwrap();
        let out = append_deltas(&cep, &cfg).unwrap();
        // Interior frames: delta equals the slope, delta-delta is zero.
        for i in 4..t - 4 {
            for (j, &slope) in a.iter().enumerate() {
                assert!(
                    (out.data[[i, j]] - slope).abs() < 1e-12,
                    "delta[{i},{j}] = {}",
                    out.data[[i, j]]
                );
                assert!(
                    out.data[[i, 3 + j]].abs() < 1e-12,
                    "delta2[{i},{j}] = {}",
                    out.data[[i, 3 + j]]
                );
            }
        }
    }

    #[test]
    fn output_dims_with_and_without_statics() {
        let cep =
            FeatureMatrix::new(Array2::from_elem((5, 20), 0.3), FeatureKind::Cep).unwrap();
        let mut cfg = CepstralConfig::new(tfb(20, 512), 20);
        assert_eq!(append_deltas(&cep, &cfg).unwrap().dim(), 40);
        cfg.include_static = true;
        let with_static = append_deltas(&cep, &cfg).unwrap();
        assert_eq!(with_static.dim(), 60);
        // Statics come first, untouched.
        assert_eq!(with_static.data[[2, 3]], 0.3);
    }

    #[test]
    fn empty_input_keeps_output_dim() {
        let cfg = CepstralConfig::new(tfb(20, 512), 20);
        let cep = FeatureMatrix::new(Array2::zeros((0, 20)), FeatureKind::Cep).unwrap();
        let out = append_deltas(&cep, &cfg).unwrap();
        assert_eq!(out.num_frames(), 0);
        assert_eq!(out.dim(), 40);
    }

    #[test]
    fn config_validation() {
        let mut cfg = CepstralConfig::new(tfb(20, 512), 21);
        assert!(cfg.validate().is_err(), "M > C accepted");
        cfg.num_coeffs = 20;
        cfg.log_floor = 0.0;
        assert!(cfg.validate().is_err(), "zero floor accepted");
        cfg.log_floor = 1e-10;
        cfg.delta_window = 0;
        assert!(cfg.validate().is_err(), "zero delta window accepted");
    }

    #[test]
    fn utterance_pipeline_shapes_and_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let samples: Vec<f64> = (0..480).map(|_| rng.random_range(-0.5..0.5)).collect();
        let audio = AudioBuffer::new(samples, 16000).unwrap();
        let cfg = PipelineConfig::new(512, CepstralConfig::new(tfb(20, 512), 20));

        let a = extract_utterance(&audio, &cfg).unwrap();
        assert_eq!(a.num_frames(), 2);
        assert_eq!(a.dim(), 40);

        let b = extract_utterance(&audio, &cfg).unwrap();
        assert_eq!(a.data, b.data, "pipeline not deterministic");
    }

    #[test]
    fn pipeline_rejects_mismatched_audio_and_bank() {
        let audio = AudioBuffer::new(vec![0.1; 960], 48000).unwrap();
        let cfg = PipelineConfig::new(512, CepstralConfig::new(tfb(20, 512), 20));
        assert!(extract_utterance(&audio, &cfg).is_err());
    }

    #[test]
    fn pipeline_rejects_bank_fft_mismatch() {
        let cfg = PipelineConfig::new(1024, CepstralConfig::new(tfb(20, 512), 20));
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn short_audio_yields_empty_features() {
        let audio = AudioBuffer::new(vec![0.1; 100], 16000).unwrap();
        let cfg = PipelineConfig::new(512, CepstralConfig::new(tfb(20, 512), 20));
        let out = extract_utterance(&audio, &cfg).unwrap();
        assert_eq!(out.num_frames(), 0);
        assert_eq!(out.dim(), 40);
    }
}
