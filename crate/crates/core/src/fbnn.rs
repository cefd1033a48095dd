//! The trainable filter-bank network.
//!
//! A three-layer classifier whose first layer is a constrained linear map:
//!
//! ```text
//! H1    = F . W_fb                 W_fb = sigmoid(W) (.) mask
//! H2    = sigmoid(H1 . W2 + b2)
//! probs = softmax(H2 . W3 + b3)
//! ```
//!
//! The sigmoid squashes every first-layer weight into (0, 1) and the fixed
//! band-limiting mask zeroes everything outside each channel's band, so W_fb
//! is always a valid filter bank and can be exported as one after training.
//!
//! Updates use the momentum form `g_new = (1 - m) * g + m * g_old`,
//! `param -= rate * g_new`, applied to all five parameter tensors. Note this
//! is a blend of the current and previous gradient, not the classical
//! accumulated-velocity rule.

use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::filterbank::{BankOrigin, FilterBankMatrix};

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Per-epoch learning rate and momentum.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScheduleEntry {
    pub rate: f64,
    pub momentum: f64,
}

/// Training hyperparameters. The schedule is indexed by epoch; epochs past
/// the end reuse the last entry, so the default two entries mean "0.1 with
/// no momentum for the first epoch, then 1.0 with momentum 0.9".
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub schedule: Vec<ScheduleEntry>,
    pub seed: u64,
    pub h2_nodes: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 30,
            batch_size: 128,
            schedule: vec![
                ScheduleEntry { rate: 0.1, momentum: 0.0 },
                ScheduleEntry { rate: 1.0, momentum: 0.9 },
            ],
            seed: 0,
            h2_nodes: 100,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 || self.h2_nodes == 0 {
            return Err(Error::Config(
                "epochs, batch size and hidden nodes must all be at least 1".into(),
            ));
        }
        if self.schedule.is_empty() {
            return Err(Error::Config("schedule must have at least one entry".into()));
        }
        for (i, e) in self.schedule.iter().enumerate() {
            if !(e.rate > 0.0 && e.rate.is_finite()) {
                return Err(Error::Config(format!(
                    "schedule entry {i}: learning rate must be positive, got {}",
                    e.rate
                )));
            }
            if !(0.0..1.0).contains(&e.momentum) {
                return Err(Error::Config(format!(
                    "schedule entry {i}: momentum must be in [0, 1), got {}",
                    e.momentum
                )));
            }
        }
        Ok(())
    }

    /// Schedule entry for a 0-based epoch index.
    pub fn entry_for_epoch(&self, epoch: usize) -> ScheduleEntry {
        self.schedule[epoch.min(self.schedule.len() - 1)]
    }
}

/// A mini-batch of power-spectrum rows with class labels.
#[derive(Debug, Clone)]
pub struct LabeledBatch {
    /// B x D, finite and non-negative.
    pub inputs: Array2<f64>,
    /// B class indices, each < N_out.
    pub labels: Vec<usize>,
}

impl LabeledBatch {
    pub fn new(inputs: Array2<f64>, labels: Vec<usize>, n_out: usize) -> Result<Self> {
        if inputs.nrows() != labels.len() {
            return Err(Error::DimMismatch(format!(
                "{} input rows but {} labels",
                inputs.nrows(),
                labels.len()
            )));
        }
        if inputs.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain(
                "power-spectrum inputs must be finite and non-negative".into(),
            ));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= n_out) {
            return Err(Error::Config(format!(
                "label {bad} is out of range for {n_out} output nodes"
            )));
        }
        Ok(LabeledBatch { inputs, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Last-step gradients, one slot per trainable tensor.
#[derive(Debug, Clone)]
pub struct MomentumState {
    pub w: Array2<f64>,
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
    pub w3: Array2<f64>,
    pub b3: Array1<f64>,
}

/// Batch-mean gradients for every trainable tensor.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub w: Array2<f64>,
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
    pub w3: Array2<f64>,
    pub b3: Array1<f64>,
}

/// Everything the forward pass produces for one batch.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    /// B x C filter-bank layer output.
    pub h1: Array2<f64>,
    /// B x H2 sigmoid activations.
    pub h2: Array2<f64>,
    /// B x N_out softmax rows.
    pub probs: Array2<f64>,
    /// Mean cross-entropy over the batch.
    pub loss: f64,
}

/// The network. Output node 0 is the human class; the remaining nodes are
/// spoofing classes.
#[derive(Debug, Clone)]
pub struct FbnnModel {
    /// D x C pre-constraint first-layer weights.
    pub w: Array2<f64>,
    /// Fixed band-limiting mask, same shape as `w`.
    pub mask: FilterBankMatrix,
    /// C x H2.
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
    /// H2 x N_out.
    pub w3: Array2<f64>,
    pub b3: Array1<f64>,
    pub momentum: MomentumState,
}

fn uniform_init(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.random_range(-0.05..=0.05))
}

impl FbnnModel {
    /// Fresh model: weights uniform in [-0.05, 0.05] (drawn in the order W,
    /// W2, W3), biases zero, momentum state zero.
    pub fn new_random(
        mask: FilterBankMatrix,
        h2_nodes: usize,
        n_out: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self> {
        mask.validate()?;
        if n_out < 2 {
            return Err(Error::Config(format!(
                "need at least 2 output classes, got {n_out}"
            )));
        }
        let (d, c) = (mask.dim(), mask.channels());
        let w = uniform_init(rng, d, c);
        let w2 = uniform_init(rng, c, h2_nodes);
        let w3 = uniform_init(rng, h2_nodes, n_out);
        Ok(FbnnModel {
            w,
            mask,
            w2,
            b2: Array1::zeros(h2_nodes),
            w3,
            b3: Array1::zeros(n_out),
            momentum: MomentumState {
                w: Array2::zeros((d, c)),
                w2: Array2::zeros((c, h2_nodes)),
                b2: Array1::zeros(h2_nodes),
                w3: Array2::zeros((h2_nodes, n_out)),
                b3: Array1::zeros(n_out),
            },
        })
    }

    pub fn input_dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn channels(&self) -> usize {
        self.w.ncols()
    }

    pub fn n_out(&self) -> usize {
        self.b3.len()
    }

    /// The constrained first layer as a bank: `sigmoid(W) (.) mask`.
    /// Entries always sit in [0, mask] elementwise.
    pub fn effective_filter_bank(&self) -> FilterBankMatrix {
        let weights = ndarray::Zip::from(&self.w)
            .and(&self.mask.weights)
            .map_collect(|&w, &m| sigmoid(w) * m);
        FilterBankMatrix {
            weights,
            sample_rate: self.mask.sample_rate,
            origin: BankOrigin::Learned,
        }
    }

    /// First-layer output `F . W_fb` for raw input rows; no bias.
    pub fn hidden1(&self, inputs: &Array2<f64>) -> Result<Array2<f64>> {
        if inputs.ncols() != self.input_dim() {
            return Err(Error::DimMismatch(format!(
                "inputs have {} columns, model expects {}",
                inputs.ncols(),
                self.input_dim()
            )));
        }
        Ok(inputs.dot(&self.effective_filter_bank().weights))
    }

    /// Full forward pass with the batch-mean cross-entropy loss.
    pub fn forward(&self, batch: &LabeledBatch) -> Result<ForwardPass> {
        let check = |name: &'static str, a: &Array2<f64>| -> Result<()> {
            if a.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numeric {
                    layer: name,
                    detail: "non-finite activation".into(),
                });
            }
            Ok(())
        };

        let h1 = self.hidden1(&batch.inputs)?;
        check("h1", &h1)?;
        let h2 = (h1.dot(&self.w2) + &self.b2).mapv(sigmoid);
        check("h2", &h2)?;
        let logits = h2.dot(&self.w3) + &self.b3;
        check("output", &logits)?;

        // Row-stable softmax.
        let mut probs = logits;
        for mut row in probs.rows_mut() {
            let max = row.iter().cloned().fold(f64::MIN, f64::max);
            row.mapv_inplace(|v| (v - max).exp());
            let sum = row.sum();
            row.mapv_inplace(|v| v / sum);
        }

        let mut loss = 0.0;
        for (i, &label) in batch.labels.iter().enumerate() {
            loss -= probs[[i, label]].ln();
        }
        loss /= batch.len().max(1) as f64;
        if !loss.is_finite() {
            return Err(Error::Numeric {
                layer: "loss",
                detail: format!("cross-entropy diverged to {loss}"),
            });
        }
        Ok(ForwardPass { h1, h2, probs, loss })
    }

    /// Gradient of the loss with respect to the pre-constraint first-layer
    /// weights, given inputs F and the upstream gradient dL/dH1:
    /// `g = (F^T . dH1) (.) mask (.) s(W)(1 - s(W))`.
    ///
    /// Masked-out entries get exactly zero regardless of the upstream term.
    pub fn first_layer_gradient(
        &self,
        inputs: &Array2<f64>,
        dh1: &Array2<f64>,
    ) -> Array2<f64> {
        let raw = inputs.t().dot(dh1);
        ndarray::Zip::from(&raw)
            .and(&self.mask.weights)
            .and(&self.w)
            .map_collect(|&g, &m, &w| {
                let s = sigmoid(w);
                g * m * s * (1.0 - s)
            })
    }

    /// Backprop for all five tensors; gradients are means over the batch.
    /// Returns the forward pass as well so callers can log the loss.
    pub fn gradients(&self, batch: &LabeledBatch) -> Result<(Gradients, ForwardPass)> {
        let pass = self.forward(batch)?;
        let b = batch.len() as f64;

        // d loss / d logits for softmax + cross entropy, already batch-mean.
        let mut dlogits = pass.probs.clone();
        for (i, &label) in batch.labels.iter().enumerate() {
            dlogits[[i, label]] -= 1.0;
        }
        dlogits /= b;

        let gw3 = pass.h2.t().dot(&dlogits);
        let gb3 = dlogits.sum_axis(Axis(0));

        let dh2 = dlogits.dot(&self.w3.t()) * &pass.h2.mapv(|s| s * (1.0 - s));
        let gw2 = pass.h1.t().dot(&dh2);
        let gb2 = dh2.sum_axis(Axis(0));

        let dh1 = dh2.dot(&self.w2.t());
        let gw = self.first_layer_gradient(&batch.inputs, &dh1);

        Ok((
            Gradients {
                w: gw,
                w2: gw2,
                b2: gb2,
                w3: gw3,
                b3: gb3,
            },
            pass,
        ))
    }

    /// One momentum-SGD step: for each tensor,
    /// `g_new = (1 - m) * g + m * g_old; param -= rate * g_new`, and the
    /// new blend becomes the stored `g_old`. A zero rate still advances the
    /// momentum state.
    pub fn sgd_update(&mut self, grads: &Gradients, rate: f64, momentum: f64) {
        fn step2(p: &mut Array2<f64>, old: &mut Array2<f64>, g: &Array2<f64>, rate: f64, m: f64) {
            let g_new = g.mapv(|v| (1.0 - m) * v) + old.mapv(|v| m * v);
            *p -= &g_new.mapv(|v| rate * v);
            *old = g_new;
        }
        fn step1(p: &mut Array1<f64>, old: &mut Array1<f64>, g: &Array1<f64>, rate: f64, m: f64) {
            let g_new = g.mapv(|v| (1.0 - m) * v) + old.mapv(|v| m * v);
            *p -= &g_new.mapv(|v| rate * v);
            *old = g_new;
        }
        step2(&mut self.w, &mut self.momentum.w, &grads.w, rate, momentum);
        step2(&mut self.w2, &mut self.momentum.w2, &grads.w2, rate, momentum);
        step1(&mut self.b2, &mut self.momentum.b2, &grads.b2, rate, momentum);
        step2(&mut self.w3, &mut self.momentum.w3, &grads.w3, rate, momentum);
        step1(&mut self.b3, &mut self.momentum.b3, &grads.b3, rate, momentum);
    }
}

/// A trained network with its per-epoch mean losses.
#[derive(Debug, Clone)]
pub struct TrainedFbnn {
    pub model: FbnnModel,
    /// Sample-weighted mean cross-entropy per epoch, measured pre-update.
    pub epoch_losses: Vec<f64>,
}

/// Train on labeled power-spectrum rows. Labels must be contiguous from 0;
/// every class must appear at least once. The run is bit-reproducible for a
/// fixed seed: one ChaCha stream drives init and every epoch's shuffle.
pub fn train_fbnn(
    inputs: &Array2<f64>,
    labels: &[usize],
    mask: FilterBankMatrix,
    cfg: &TrainConfig,
) -> Result<TrainedFbnn> {
    cfg.validate()?;
    if inputs.nrows() != labels.len() {
        return Err(Error::DimMismatch(format!(
            "{} input rows but {} labels",
            inputs.nrows(),
            labels.len()
        )));
    }
    if labels.is_empty() {
        return Err(Error::Config("training set is empty".into()));
    }
    let n_out = labels.iter().max().unwrap() + 1;
    if n_out < 2 {
        return Err(Error::Config(
            "training set needs at least two classes".into(),
        ));
    }
    for class in 0..n_out {
        if !labels.contains(&class) {
            return Err(Error::Config(format!(
                "class {class} has no training samples (labels must be contiguous from 0)"
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = FbnnModel::new_random(mask, cfg.h2_nodes, n_out, &mut rng)?;

    let n = labels.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let entry = cfg.entry_for_epoch(epoch);
        order.shuffle(&mut rng);

        let mut loss_sum = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch_inputs = inputs.select(Axis(0), chunk);
            let batch_labels: Vec<usize> = chunk.iter().map(|&i| labels[i]).collect();
            let batch = LabeledBatch::new(batch_inputs, batch_labels, n_out)?;
            let (grads, pass) = model.gradients(&batch)?;
            loss_sum += pass.loss * batch.len() as f64;
            model.sgd_update(&grads, entry.rate, entry.momentum);
        }
        epoch_losses.push(loss_sum / n as f64);
    }

    Ok(TrainedFbnn { model, epoch_losses })
}
