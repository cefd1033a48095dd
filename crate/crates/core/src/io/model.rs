//! JSON model containers.
//!
//! Tensors travel as `{ "shape": [...], "data": "<base64>" }` where the
//! payload is the row-major little-endian f64 values. The JSON wrapper is
//! emitted with a fixed field order and no timestamps, so saving the same
//! model twice produces identical bytes.

use std::path::Path;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fbnn::{FbnnModel, MomentumState, TrainConfig};
use crate::filterbank::{BankOrigin, FilterBankMatrix};
use crate::gmm::{GmmModel, GmmTrainConfig, ReseedEvent};

pub const FBNN_FORMAT: &str = "fbnn-model-v1";
pub const GMM_FORMAT: &str = "gmm-model-v1";

/// A dense tensor as shape plus base64 little-endian f64 bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorBlob {
    pub shape: Vec<usize>,
    pub data: String,
}

impl TensorBlob {
    fn encode(shape: Vec<usize>, values: impl Iterator<Item = f64>) -> Self {
        let mut bytes = Vec::new();
        for v in values {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        TensorBlob {
            shape,
            data: BASE64.encode(bytes),
        }
    }

    pub fn from_array2(a: &Array2<f64>) -> Self {
        Self::encode(vec![a.nrows(), a.ncols()], a.iter().cloned())
    }

    pub fn from_array1(a: &Array1<f64>) -> Self {
        Self::encode(vec![a.len()], a.iter().cloned())
    }

    fn decode(&self, expect_len: usize) -> Result<Vec<f64>> {
        let bytes = BASE64
            .decode(&self.data)
            .map_err(|e| Error::Config(format!("bad base64 tensor payload: {e}")))?;
        if bytes.len() != 8 * expect_len {
            return Err(Error::Config(format!(
                "tensor shape {:?} needs {} bytes, payload has {}",
                self.shape,
                8 * expect_len,
                bytes.len()
            )));
        }
        let mut out = Vec::with_capacity(expect_len);
        for chunk in bytes.chunks_exact(8) {
            out.push(f64::from_le_bytes(chunk.try_into().unwrap()));
        }
        Ok(out)
    }

    pub fn to_array2(&self) -> Result<Array2<f64>> {
        if self.shape.len() != 2 {
            return Err(Error::Config(format!(
                "expected a rank-2 tensor, got shape {:?}",
                self.shape
            )));
        }
        let (r, c) = (self.shape[0], self.shape[1]);
        let values = self.decode(r * c)?;
        Array2::from_shape_vec((r, c), values)
            .map_err(|e| Error::Config(format!("tensor shape error: {e}")))
    }

    pub fn to_array1(&self) -> Result<Array1<f64>> {
        if self.shape.len() != 1 {
            return Err(Error::Config(format!(
                "expected a rank-1 tensor, got shape {:?}",
                self.shape
            )));
        }
        Ok(Array1::from_vec(self.decode(self.shape[0])?))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BankBlob {
    pub sample_rate: u32,
    pub origin: BankOrigin,
    pub weights: TensorBlob,
}

impl BankBlob {
    pub fn from_bank(bank: &FilterBankMatrix) -> Self {
        BankBlob {
            sample_rate: bank.sample_rate,
            origin: bank.origin.clone(),
            weights: TensorBlob::from_array2(&bank.weights),
        }
    }

    pub fn to_bank(&self) -> Result<FilterBankMatrix> {
        let bank = FilterBankMatrix {
            weights: self.weights.to_array2()?,
            sample_rate: self.sample_rate,
            origin: self.origin.clone(),
        };
        bank.validate()?;
        Ok(bank)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentumBlob {
    pub w: TensorBlob,
    pub w2: TensorBlob,
    pub b2: TensorBlob,
    pub w3: TensorBlob,
    pub b3: TensorBlob,
}

/// Serialized network, mask and training provenance included.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FbnnModelFile {
    pub format: String,
    pub config: TrainConfig,
    pub mask: BankBlob,
    pub w: TensorBlob,
    pub w2: TensorBlob,
    pub b2: TensorBlob,
    pub w3: TensorBlob,
    pub b3: TensorBlob,
    pub momentum: MomentumBlob,
    pub epoch_losses: Vec<f64>,
}

/// Serialized mixture with its training provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GmmModelFile {
    pub format: String,
    pub config: GmmTrainConfig,
    pub weights: TensorBlob,
    pub means: TensorBlob,
    pub variances: TensorBlob,
    pub ll_trace: Vec<f64>,
    pub reseeds: Vec<(usize, usize)>,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::json(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::json(path, e))
}

pub fn save_fbnn_model(
    path: &Path,
    model: &FbnnModel,
    cfg: &TrainConfig,
    epoch_losses: &[f64],
) -> Result<()> {
    let file = FbnnModelFile {
        format: FBNN_FORMAT.to_string(),
        config: cfg.clone(),
        mask: BankBlob::from_bank(&model.mask),
        w: TensorBlob::from_array2(&model.w),
        w2: TensorBlob::from_array2(&model.w2),
        b2: TensorBlob::from_array1(&model.b2),
        w3: TensorBlob::from_array2(&model.w3),
        b3: TensorBlob::from_array1(&model.b3),
        momentum: MomentumBlob {
            w: TensorBlob::from_array2(&model.momentum.w),
            w2: TensorBlob::from_array2(&model.momentum.w2),
            b2: TensorBlob::from_array1(&model.momentum.b2),
            w3: TensorBlob::from_array2(&model.momentum.w3),
            b3: TensorBlob::from_array1(&model.momentum.b3),
        },
        epoch_losses: epoch_losses.to_vec(),
    };
    write_json(path, &file)
}

pub fn load_fbnn_model(path: &Path) -> Result<(FbnnModel, TrainConfig, Vec<f64>)> {
    let file: FbnnModelFile = read_json(path)?;
    if file.format != FBNN_FORMAT {
        return Err(Error::Config(format!(
            "{}: format {:?}, expected {FBNN_FORMAT:?}",
            path.display(),
            file.format
        )));
    }
    let mask = file.mask.to_bank()?;
    let model = FbnnModel {
        w: file.w.to_array2()?,
        mask,
        w2: file.w2.to_array2()?,
        b2: file.b2.to_array1()?,
        w3: file.w3.to_array2()?,
        b3: file.b3.to_array1()?,
        momentum: MomentumState {
            w: file.momentum.w.to_array2()?,
            w2: file.momentum.w2.to_array2()?,
            b2: file.momentum.b2.to_array1()?,
            w3: file.momentum.w3.to_array2()?,
            b3: file.momentum.b3.to_array1()?,
        },
    };
    if model.w.raw_dim() != model.mask.weights.raw_dim()
        || model.w.ncols() != model.w2.nrows()
        || model.w2.ncols() != model.b2.len()
        || model.w2.ncols() != model.w3.nrows()
        || model.w3.ncols() != model.b3.len()
    {
        return Err(Error::DimMismatch(format!(
            "{}: inconsistent tensor shapes",
            path.display()
        )));
    }
    Ok((model, file.config, file.epoch_losses))
}

pub fn save_gmm_model(
    path: &Path,
    model: &GmmModel,
    cfg: &GmmTrainConfig,
    ll_trace: &[f64],
    reseeds: &[ReseedEvent],
) -> Result<()> {
    let file = GmmModelFile {
        format: GMM_FORMAT.to_string(),
        config: cfg.clone(),
        weights: TensorBlob::from_array1(&model.weights),
        means: TensorBlob::from_array2(&model.means),
        variances: TensorBlob::from_array2(&model.variances),
        ll_trace: ll_trace.to_vec(),
        reseeds: reseeds.iter().map(|r| (r.iteration, r.component)).collect(),
    };
    write_json(path, &file)
}

pub fn load_gmm_model(path: &Path) -> Result<(GmmModel, GmmTrainConfig, Vec<f64>)> {
    let file: GmmModelFile = read_json(path)?;
    if file.format != GMM_FORMAT {
        return Err(Error::Config(format!(
            "{}: format {:?}, expected {GMM_FORMAT:?}",
            path.display(),
            file.format
        )));
    }
    let model = GmmModel {
        weights: file.weights.to_array1()?,
        means: file.means.to_array2()?,
        variances: file.variances.to_array2()?,
    };
    model.validate()?;
    Ok((model, file.config, file.ll_trace))
}
