//! FBF1 feature files.
//!
//! Layout, all little-endian:
//!
//! ```text
//! offset 0   magic "FBF1"
//! offset 4   u32 rows
//! offset 8   u32 cols
//! offset 12  u8 kind tag (0 power, 1 fbank, 2 cep, 3 cep_deltas)
//! offset 13  rows * cols f32 values, row-major
//! ```
//!
//! Values are stored in 32-bit precision; reading widens back to f64.

use std::path::Path;

use ndarray::Array2;

use crate::cepstral::{FeatureKind, FeatureMatrix};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"FBF1";
const HEADER_LEN: usize = 13;

/// Serialize a feature matrix to FBF1 bytes.
pub fn encode_features(features: &FeatureMatrix) -> Result<Vec<u8>> {
    let rows = features.num_frames();
    let cols = features.dim();
    if rows > u32::MAX as usize || cols > u32::MAX as usize {
        return Err(Error::Config(format!(
            "feature matrix {rows}x{cols} exceeds the u32 header range"
        )));
    }
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * rows * cols);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(rows as u32).to_le_bytes());
    out.extend_from_slice(&(cols as u32).to_le_bytes());
    out.push(features.kind.tag());
    for &v in features.data.iter() {
        let narrow = v as f32;
        if !narrow.is_finite() {
            return Err(Error::Numeric {
                layer: "fbf1-write",
                detail: format!("value {v} does not fit in 32-bit storage"),
            });
        }
        out.extend_from_slice(&narrow.to_le_bytes());
    }
    Ok(out)
}

/// Parse FBF1 bytes. Truncation and bad magic report the failing offset.
pub fn decode_features(buf: &[u8]) -> Result<FeatureMatrix> {
    let fail = |offset: u64, detail: String| Error::Format { offset, detail };
    if buf.len() < HEADER_LEN {
        return Err(fail(
            buf.len() as u64,
            format!("file ends inside the {HEADER_LEN}-byte header"),
        ));
    }
    if &buf[0..4] != MAGIC {
        return Err(fail(0, format!("bad magic {:?}, expected \"FBF1\"", &buf[0..4])));
    }
    let rows = u32::from_le_bytes(buf[4..8].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(buf[8..12].try_into().unwrap()) as usize;
    let kind = FeatureKind::from_tag(buf[12])
        .map_err(|e| fail(12, e.to_string()))?;

    let expect = HEADER_LEN as u64 + 4 * rows as u64 * cols as u64;
    if (buf.len() as u64) != expect {
        return Err(fail(
            buf.len().min(expect as usize) as u64,
            format!(
                "{rows}x{cols} matrix needs {expect} bytes, file has {}",
                buf.len()
            ),
        ));
    }

    let mut data = Array2::<f64>::zeros((rows, cols));
    let mut off = HEADER_LEN;
    for i in 0..rows {
        for j in 0..cols {
            let v = f32::from_le_bytes(buf[off..off + 4].try_into().unwrap());
            if !v.is_finite() {
                return Err(fail(off as u64, format!("non-finite value {v}")));
            }
            data[[i, j]] = v as f64;
            off += 4;
        }
    }
    FeatureMatrix::new(data, kind)
}

/// Write a feature matrix to an FBF1 file.
pub fn write_features(path: &Path, features: &FeatureMatrix) -> Result<()> {
    let bytes = encode_features(features)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Read an FBF1 file.
pub fn read_features(path: &Path) -> Result<FeatureMatrix> {
    let buf = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_features(&buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_matrix_round_trips() {
        let m = FeatureMatrix::new(Array2::zeros((0, 40)), FeatureKind::CepDeltas).unwrap();
        let bytes = encode_features(&m).unwrap();
        assert_eq!(bytes.len(), HEADER_LEN);
        let back = decode_features(&bytes).unwrap();
        assert_eq!(back.num_frames(), 0);
        assert_eq!(back.dim(), 40);
        assert_eq!(back.kind, FeatureKind::CepDeltas);
    }

    #[test]
    fn random_matrix_round_trips_at_f32_precision() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let data = Array2::from_shape_fn((2, 40), |_| rng.random_range(-100.0..100.0));
        let m = FeatureMatrix::new(data.clone(), FeatureKind::Cep).unwrap();
        let bytes = encode_features(&m).unwrap();
        let back = decode_features(&bytes).unwrap();
        assert_eq!(back.kind, FeatureKind::Cep);
        for (orig, got) in data.iter().zip(back.data.iter()) {
            assert_eq!(*got, *orig as f32 as f64, "storage is exactly one f32 rounding");
        }
        // Stored values survive a second round untouched.
        let again = encode_features(&back).unwrap();
        assert_eq!(bytes, again);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.fbf1");
        let m = FeatureMatrix::new(Array2::from_elem((3, 5), 0.25), FeatureKind::Power).unwrap();
        write_features(&path, &m).unwrap();
        let back = read_features(&path).unwrap();
        assert_eq!(back.data, m.data);
    }

    #[test]
    fn bad_magic_reports_offset_zero() {
        let m = FeatureMatrix::new(Array2::zeros((1, 1)), FeatureKind::Power).unwrap();
        let mut bytes = encode_features(&m).unwrap();
        bytes[0] = b'X';
        match decode_features(&bytes) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let m = FeatureMatrix::new(Array2::from_elem((2, 3), 1.0), FeatureKind::Fbank).unwrap();
        let bytes = encode_features(&m).unwrap();
        assert!(matches!(
            decode_features(&bytes[..bytes.len() - 2]),
            Err(Error::Format { .. })
        ));
        // Header promising more data than the file holds.
        let mut oversize = bytes.clone();
        oversize[4..8].copy_from_slice(&100u32.to_le_bytes());
        assert!(matches!(decode_features(&oversize), Err(Error::Format { .. })));
    }

    #[test]
    fn unknown_kind_tag_is_rejected() {
        let m = FeatureMatrix::new(Array2::zeros((1, 2)), FeatureKind::Power).unwrap();
        let mut bytes = encode_features(&m).unwrap();
        bytes[12] = 9;
        assert!(matches!(
            decode_features(&bytes),
            Err(Error::Format { offset: 12, .. })
        ));
    }
}
