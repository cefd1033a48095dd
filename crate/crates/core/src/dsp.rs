//! Front-end DSP: pre-emphasis, framing, windowing and per-frame power spectra.

use ndarray::Array2;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

/// Apply the first-order pre-emphasis filter `y[n] = x[n] - coeff * x[n-1]`,
/// with `y[0] = x[0]`. An empty signal stays empty.
pub fn pre_emphasize(audio: &AudioBuffer, coeff: f64) -> Result<AudioBuffer> {
    if !(0.0..1.0).contains(&coeff) {
        return Err(Error::Config(format!(
            "pre-emphasis coefficient must be in [0, 1), got {coeff}"
        )));
    }
    let x = &audio.samples;
    let mut y = Vec::with_capacity(x.len());
    if let Some(&first) = x.first() {
        y.push(first);
        for n in 1..x.len() {
            y.push(x[n] - coeff * x[n - 1]);
        }
    }
    Ok(AudioBuffer {
        samples: y,
        sample_rate: audio.sample_rate,
    })
}

/// Symmetric Hamming window `w[n] = 0.54 - 0.46 cos(2 pi n / (len - 1))`.
///
/// A length-1 window is `[1.0]`.
pub fn hamming_window(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    (0..len)
        .map(|n| 0.54 - 0.46 * (2.0 * std::f64::consts::PI * n as f64 / (len - 1) as f64).cos())
        .collect()
}

/// Windowed frames of an utterance, row per frame.
#[derive(Debug, Clone)]
pub struct FrameMatrix {
    /// `num_frames x frame_len`, already multiplied by the Hamming window.
    pub frames: Array2<f64>,
    pub frame_len: usize,
    /// Hop between frame starts, in samples.
    pub hop: usize,
}

impl FrameMatrix {
    pub fn num_frames(&self) -> usize {
        self.frames.nrows()
    }
}

/// Number of full frames that fit: `floor((len - frame_len) / hop) + 1`,
/// or 0 when the signal is shorter than one frame.
pub fn frame_count(signal_len: usize, frame_len: usize, hop: usize) -> usize {
    if signal_len < frame_len {
        0
    } else {
        (signal_len - frame_len) / hop + 1
    }
}

/// Slice the signal into overlapping frames and apply a Hamming window to each.
///
/// `frame_len = round(frame_ms * sample_rate / 1000)`, hop likewise. A signal
/// shorter than one frame produces a 0-row matrix.
pub fn frame_and_window(audio: &AudioBuffer, frame_ms: f64, hop_ms: f64) -> Result<FrameMatrix> {
    if !(hop_ms > 0.0 && frame_ms >= hop_ms) {
        return Err(Error::Config(format!(
            "need frame_ms >= hop_ms > 0 (got frame {frame_ms} ms, hop {hop_ms} ms)"
        )));
    }
    let sr = audio.sample_rate as f64;
    let frame_len = (frame_ms * sr / 1000.0).round() as usize;
    let hop = (hop_ms * sr / 1000.0).round() as usize;
    if frame_len == 0 || hop == 0 {
        return Err(Error::Config(format!(
            "frame/hop rounds to zero samples at {} Hz (frame {frame_ms} ms, hop {hop_ms} ms)",
            audio.sample_rate
        )));
    }

    let t = frame_count(audio.len(), frame_len, hop);
    let window = hamming_window(frame_len);
    let mut frames = Array2::<f64>::zeros((t, frame_len));
    for (i, mut row) in frames.outer_iter_mut().enumerate() {
        let start = i * hop;
        for (j, w) in window.iter().enumerate() {
            row[j] = audio.samples[start + j] * w;
        }
    }
    Ok(FrameMatrix {
        frames,
        frame_len,
        hop,
    })
}

/// One-sided power spectrum of a single frame.
#[derive(Debug, Clone)]
pub struct PowerSpectrum {
    /// `|FFT_N(frame)[k]|^2` for `k = 0..=N/2`; unscaled.
    pub bins: Vec<f64>,
    pub nfft: usize,
}

impl PowerSpectrum {
    /// Number of retained bins, `N/2 + 1`.
    pub fn dim(&self) -> usize {
        self.bins.len()
    }
}

/// Number of one-sided spectrum bins for an `nfft`-point transform.
pub fn spectrum_dim(nfft: usize) -> usize {
    nfft / 2 + 1
}

fn check_fft_args(frame_len: usize, nfft: usize) -> Result<()> {
    if !nfft.is_power_of_two() {
        return Err(Error::Config(format!(
            "FFT size must be a power of two, got {nfft}"
        )));
    }
    if frame_len > nfft {
        return Err(Error::Config(format!(
            "frame length {frame_len} exceeds FFT size {nfft}"
        )));
    }
    Ok(())
}

fn frame_power_bins(
    frame: &[f64],
    nfft: usize,
    fft: &dyn rustfft::Fft<f64>,
    scratch: &mut [Complex<f64>],
) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = frame
        .iter()
        .map(|&x| Complex::new(x, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(nfft)
        .collect();
    fft.process_with_scratch(&mut buf, scratch);
    buf[..=nfft / 2].iter().map(|c| c.norm_sqr()).collect()
}

/// Power spectrum of one frame, zero-padded to `nfft` (a power of two).
pub fn power_spectrum(frame: &[f64], nfft: usize) -> Result<PowerSpectrum> {
    check_fft_args(frame.len(), nfft)?;
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(nfft);
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    Ok(PowerSpectrum {
        bins: frame_power_bins(frame, nfft, fft.as_ref(), &mut scratch),
        nfft,
    })
}

/// Power spectra of every frame, `num_frames x (nfft/2 + 1)`.
pub fn power_spectrogram(frames: &FrameMatrix, nfft: usize) -> Result<Array2<f64>> {
    check_fft_args(frames.frame_len, nfft)?;
    let dim = spectrum_dim(nfft);
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(nfft);
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];

    let mut out = Array2::<f64>::zeros((frames.num_frames(), dim));
    for (i, frame) in frames.frames.outer_iter().enumerate() {
        let bins = frame_power_bins(frame.as_slice().unwrap(), nfft, fft.as_ref(), &mut scratch);
        for (j, b) in bins.into_iter().enumerate() {
            out[[i, j]] = b;
        }
    }
    Ok(out)
}
