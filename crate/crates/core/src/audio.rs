//! Mono audio buffers and a minimal 16-bit PCM WAV reader/writer.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// A mono audio signal with its sample rate.
///
/// Samples are real amplitudes, nominally in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl AudioBuffer {
    /// Wrap a sample vector, rejecting non-finite samples and a zero sample rate.
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::Config("sample rate must be positive".into()));
        }
        if let Some(idx) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Domain(format!(
                "sample {idx} is not finite ({})",
                samples[idx]
            )));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}

fn read_u32(buf: &[u8], offset: usize) -> Result<u32> {
    let bytes: [u8; 4] = buf
        .get(offset..offset + 4)
        .ok_or_else(|| truncated(offset))?
        .try_into()
        .unwrap();
    Ok(u32::from_le_bytes(bytes))
}

fn read_u16(buf: &[u8], offset: usize) -> Result<u16> {
    let bytes: [u8; 2] = buf
        .get(offset..offset + 2)
        .ok_or_else(|| truncated(offset))?
        .try_into()
        .unwrap();
    Ok(u16::from_le_bytes(bytes))
}

fn truncated(offset: usize) -> Error {
    Error::Format {
        offset: offset as u64,
        detail: "unexpected end of file".into(),
    }
}

/// Read a 16-bit PCM mono RIFF/WAVE file.
///
/// Sample values are normalized by `1 / 32768`.
pub fn read_wav_mono16(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let path = path.as_ref();
    let buf = fs::read(path).map_err(|e| Error::io(path, e))?;

    if buf.len() < 12 || &buf[0..4] != b"RIFF" {
        return Err(Error::Format {
            offset: 0,
            detail: "missing RIFF magic".into(),
        });
    }
    if &buf[8..12] != b"WAVE" {
        return Err(Error::Format {
            offset: 8,
            detail: "missing WAVE form type".into(),
        });
    }

    let mut pos = 12usize;
    let mut fmt: Option<(u16, u16, u32, u16)> = None; // (format, channels, rate, bits)
    let mut data: Option<(usize, usize)> = None; // (offset, len)

    while pos + 8 <= buf.len() {
        let id = &buf[pos..pos + 4];
        let size = read_u32(&buf, pos + 4)? as usize;
        let body = pos + 8;
        if body + size > buf.len() {
            return Err(Error::Format {
                offset: body as u64,
                detail: format!("chunk `{}` overruns file", String::from_utf8_lossy(id)),
            });
        }
        match id {
            b"fmt " => {
                let format = read_u16(&buf, body)?;
                let channels = read_u16(&buf, body + 2)?;
                let rate = read_u32(&buf, body + 4)?;
                let bits = read_u16(&buf, body + 14)?;
                fmt = Some((format, channels, rate, bits));
            }
            b"data" => {
                data = Some((body, size));
            }
            _ => {}
        }
        // Chunks are word-aligned.
        pos = body + size + (size & 1);
    }

    let (format, channels, rate, bits) = fmt.ok_or(Error::Format {
        offset: 12,
        detail: "no fmt chunk".into(),
    })?;
    if format != 1 || bits != 16 {
        return Err(Error::Config(format!(
            "only 16-bit PCM supported (got format {format}, {bits} bits)"
        )));
    }
    if channels != 1 {
        return Err(Error::Config(format!(
            "only mono supported (got {channels} channels)"
        )));
    }
    let (off, len) = data.ok_or(Error::Format {
        offset: pos as u64,
        detail: "no data chunk".into(),
    })?;
    if len % 2 != 0 {
        return Err(Error::Format {
            offset: (off + len) as u64,
            detail: "odd data chunk length for 16-bit samples".into(),
        });
    }

    let samples = buf[off..off + len]
        .chunks_exact(2)
        .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64 / 32768.0)
        .collect();
    AudioBuffer::new(samples, rate)
}

/// Write a mono signal as 16-bit PCM WAV. Samples are clamped to `[-1, 1]`.
pub fn write_wav_mono16(path: impl AsRef<Path>, audio: &AudioBuffer) -> Result<()> {
    let path = path.as_ref();
    let n = audio.samples.len();
    let data_len = (n * 2) as u32;
    let mut out = Vec::with_capacity(44 + n * 2);

    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&audio.sample_rate.to_le_bytes());
    out.extend_from_slice(&(audio.sample_rate * 2).to_le_bytes()); // byte rate
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes()); // bits
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &s in &audio.samples {
        let v = (s.clamp(-1.0, 1.0) * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        out.extend_from_slice(&v.to_le_bytes());
    }

    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_sample_rate() {
        assert!(AudioBuffer::new(vec![0.0], 0).is_err());
    }

    #[test]
    fn rejects_non_finite_samples() {
        assert!(AudioBuffer::new(vec![0.0, f64::NAN], 16000).is_err());
    }

    #[test]
    fn wav_round_trip_preserves_quantized_samples() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.wav");
        // Values on the 1/32768 grid survive the round trip exactly.
        let samples: Vec<f64> = (-5..5).map(|i| i as f64 * 100.0 / 32768.0).collect();
        let audio = AudioBuffer::new(samples.clone(), 16000).unwrap();
        write_wav_mono16(&path, &audio).unwrap();
        let back = read_wav_mono16(&path).unwrap();
        assert_eq!(back.sample_rate, 16000);
        assert_eq!(back.samples, samples);
    }

    #[test]
    fn rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.wav");
        std::fs::write(&path, b"not a wav file").unwrap();
        match read_wav_mono16(&path) {
            Err(Error::Format { offset: 0, .. }) => {}
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_stereo() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stereo.wav");
        let mut out = Vec::new();
        out.extend_from_slice(b"RIFF");
        out.extend_from_slice(&36u32.to_le_bytes());
        out.extend_from_slice(b"WAVE");
        out.extend_from_slice(b"fmt ");
        out.extend_from_slice(&16u32.to_le_bytes());
        out.extend_from_slice(&1u16.to_le_bytes());
        out.extend_from_slice(&2u16.to_le_bytes()); // stereo
        out.extend_from_slice(&16000u32.to_le_bytes());
        out.extend_from_slice(&64000u32.to_le_bytes());
        out.extend_from_slice(&4u16.to_le_bytes());
        out.extend_from_slice(&16u16.to_le_bytes());
        out.extend_from_slice(b"data");
        out.extend_from_slice(&0u32.to_le_bytes());
        std::fs::write(&path, out).unwrap();
        assert!(matches!(read_wav_mono16(&path), Err(Error::Config(_))));
    }
}
