//! Diagonal-covariance Gaussian mixture models trained with EM, plus the
//! per-utterance log-likelihood-ratio score
//!
//! ```text
//! ML(X) = (1/T) * sum_i [ log P(X_i | human) - log P(X_i | spoof) ]
//! ```
//!
//! Two models, one per class, turn pooled frame features into a single real
//! score per utterance; positive means more human-like.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cepstral::FeatureMatrix;
use crate::error::{Error, Result};

const LN_2PI: f64 = 1.8378770664093453;

/// E-steps run over fixed-size frame chunks; accumulators merge in chunk
/// order, so results are bit-stable regardless of dataset size.
const E_STEP_CHUNK: usize = 4096;

/// A mixture of K axis-aligned Gaussians.
#[derive(Debug, Clone, PartialEq)]
pub struct GmmModel {
    /// K mixture weights, summing to 1.
    pub weights: Array1<f64>,
    /// K x dim component means.
    pub means: Array2<f64>,
    /// K x dim per-dimension variances, strictly positive.
    pub variances: Array2<f64>,
}

impl GmmModel {
    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.means.ncols()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        if k == 0 || self.dim() == 0 {
            return Err(Error::Config("mixture must have K >= 1 and dim >= 1".into()));
        }
        if self.means.nrows() != k
            || self.variances.nrows() != k
            || self.variances.ncols() != self.dim()
        {
            return Err(Error::DimMismatch(format!(
                "inconsistent mixture shapes: weights {k}, means {:?}, variances {:?}",
                self.means.shape(),
                self.variances.shape()
            )));
        }
        if (self.weights.sum() - 1.0).abs() > 1e-12 || self.weights.iter().any(|&w| w < 0.0) {
            return Err(Error::Config(format!(
                "mixture weights must form a simplex, sum is {}",
                self.weights.sum()
            )));
        }
        if self
            .variances
            .iter()
            .any(|&v| !(v.is_finite() && v > 0.0))
        {
            return Err(Error::Config("variances must be positive and finite".into()));
        }
        if self.means.iter().any(|m| !m.is_finite()) {
            return Err(Error::Config("means must be finite".into()));
        }
        Ok(())
    }

    /// Log density constants, one per component:
    /// `log w_k - 0.5 * (dim * ln 2pi + sum_j ln var_kj)`.
    fn log_consts(&self) -> Array1<f64> {
        let dim = self.dim() as f64;
        Array1::from_iter((0..self.k()).map(|k| {
            let log_det: f64 = self.variances.row(k).iter().map(|v| v.ln()).sum();
            self.weights[k].ln() - 0.5 * (dim * LN_2PI + log_det)
        }))
    }
}

/// `log sum_k w_k N(frame; mean_k, diag var_k)` via log-sum-exp. The frame
/// length must equal the model dimension.
pub fn gmm_log_likelihood(model: &GmmModel, frame: ArrayView1<f64>) -> f64 {
    assert_eq!(
        frame.len(),
        model.dim(),
        "frame dimension {} does not match model dimension {}",
        frame.len(),
        model.dim()
    );
    let consts = model.log_consts();
    let mut best = f64::NEG_INFINITY;
    let mut terms = Vec::with_capacity(model.k());
    for k in 0..model.k() {
        let mut quad = 0.0;
        for j in 0..model.dim() {
            let d = frame[j] - model.means[[k, j]];
            quad += d * d / model.variances[[k, j]];
        }
        let t = consts[k] - 0.5 * quad;
        best = best.max(t);
        terms.push(t);
    }
    best + terms.iter().map(|t| (t - best).exp()).sum::<f64>().ln()
}

/// Per-frame, per-component posterior probabilities (rows sum to 1), plus
/// the total log-likelihood of the data.
pub fn responsibilities(model: &GmmModel, features: ArrayView2<f64>) -> (Array2<f64>, f64) {
    let consts = model.log_consts();
    let n = features.nrows();
    let k = model.k();
    let mut resp = Array2::<f64>::zeros((n, k));
    let mut total_ll = 0.0;
    for (i, frame) in features.outer_iter().enumerate() {
        let mut best = f64::NEG_INFINITY;
        for c in 0..k {
            let mut quad = 0.0;
            for j in 0..model.dim() {
                let d = frame[j] - model.means[[c, j]];
                quad += d * d / model.variances[[c, j]];
            }
            let t = consts[c] - 0.5 * quad;
            resp[[i, c]] = t;
            best = best.max(t);
        }
        let sum: f64 = resp.row(i).iter().map(|t| (t - best).exp()).sum();
        let ll = best + sum.ln();
        total_ll += ll;
        for c in 0..k {
            resp[[i, c]] = (resp[[i, c]] - ll).exp();
        }
    }
    (resp, total_ll)
}

/// Mean log-likelihood ratio of an utterance under the two class models;
/// positive favors the human model. Duplicating frames leaves it unchanged.
pub fn llr_score(features: &FeatureMatrix, human: &GmmModel, spoof: &GmmModel) -> Result<f64> {
    if human.dim() != spoof.dim() {
        return Err(Error::DimMismatch(format!(
            "human model dim {} vs spoof model dim {}",
            human.dim(),
            spoof.dim()
        )));
    }
    if features.num_frames() == 0 {
        return Err(Error::EmptyUtterance);
    }
    if features.dim() != human.dim() {
        return Err(Error::DimMismatch(format!(
            "features have dim {} but models expect {}",
            features.dim(),
            human.dim()
        )));
    }
    let t = features.num_frames() as f64;
    let mut sum = 0.0;
    for frame in features.data.outer_iter() {
        sum += gmm_log_likelihood(human, frame) - gmm_log_likelihood(spoof, frame);
    }
    Ok(sum / t)
}

/// How component means are seeded before EM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GmmInit {
    /// 10 Lloyd iterations on a seed-deterministic subsample.
    Kmeans,
    /// Means copied from randomly chosen frames.
    RandomFrames,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GmmTrainConfig {
    pub k: usize,
    pub em_iters: usize,
    /// Variance floor as a fraction of the global per-dimension variance.
    pub var_floor_factor: f64,
    pub seed: u64,
    pub init: GmmInit,
}

impl Default for GmmTrainConfig {
    fn default() -> Self {
        GmmTrainConfig {
            k: 512,
            em_iters: 10,
            var_floor_factor: 1e-3,
            seed: 0,
            init: GmmInit::Kmeans,
        }
    }
}

impl GmmTrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.em_iters == 0 {
            return Err(Error::Config("K and em_iters must be at least 1".into()));
        }
        if !(self.var_floor_factor > 0.0 && self.var_floor_factor.is_finite()) {
            return Err(Error::Config(format!(
                "variance floor factor must be positive, got {}",
                self.var_floor_factor
            )));
        }
        Ok(())
    }
}

/// A component that lost all its posterior mass and was re-seeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReseedEvent {
    /// 1-based EM iteration.
    pub iteration: usize,
    pub component: usize,
}

/// EM output: the model, the log-likelihood after initialization followed
/// by one entry per EM iteration, and any collapse re-seeds.
#[derive(Debug, Clone)]
pub struct TrainedGmm {
    pub model: GmmModel,
    /// `em_iters + 1` entries; non-decreasing within 1e-8 apart from
    /// re-seed events.
    pub ll_trace: Vec<f64>,
    pub reseeds: Vec<ReseedEvent>,
}

fn global_variance(features: ArrayView2<f64>) -> Array1<f64> {
    let n = features.nrows() as f64;
    let mean = features.sum_axis(Axis(0)) / n;
    let mut var = Array1::<f64>::zeros(features.ncols());
    for row in features.outer_iter() {
        for j in 0..features.ncols() {
            let d = row[j] - mean[j];
            var[j] += d * d;
        }
    }
    var / n
}

/// First `take` elements of a seeded partial Fisher-Yates permutation.
fn sample_indices(n: usize, take: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let take = take.min(n);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..take {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    idx.truncate(take);
    idx
}

fn squared_distance(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// K centroids from 10 Lloyd iterations over a subsample of the data.
fn kmeans_centroids(
    features: ArrayView2<f64>,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Array2<f64> {
    let cap = (20 * k).max(2000);
    let sample_idx = sample_indices(features.nrows(), cap, rng);
    let sample = features.select(Axis(0), &sample_idx);
    let n = sample.nrows();
    let dim = sample.ncols();

    let seed_idx = sample_indices(n, k, rng);
    let mut centers = sample.select(Axis(0), &seed_idx);
    let mut assign = vec![0usize; n];
    for _ in 0..10 {
        for (i, row) in sample.outer_iter().enumerate() {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for c in 0..k {
                let d = squared_distance(row, centers.row(c));
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            assign[i] = best;
        }
        let mut counts = vec![0usize; k];
        let mut sums = Array2::<f64>::zeros((k, dim));
        for (i, row) in sample.outer_iter().enumerate() {
            counts[assign[i]] += 1;
            for j in 0..dim {
                sums[[assign[i], j]] += row[j];
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                // Dead cluster: restart it on a random sample frame.
                let pick = rng.random_range(0..n);
                centers.row_mut(c).assign(&sample.row(pick));
            } else {
                for j in 0..dim {
                    centers[[c, j]] = sums[[c, j]] / counts[c] as f64;
                }
            }
        }
    }
    centers
}

fn initial_model(
    features: ArrayView2<f64>,
    cfg: &GmmTrainConfig,
    floor: &Array1<f64>,
    global_var: &Array1<f64>,
    rng: &mut ChaCha8Rng,
) -> GmmModel {
    let dim = features.ncols();
    let k = cfg.k;
    let means = match cfg.init {
        GmmInit::Kmeans => kmeans_centroids(features, k, rng),
        GmmInit::RandomFrames => {
            let idx = sample_indices(features.nrows(), k, rng);
            features.select(Axis(0), &idx)
        }
    };
    // Start every component with uniform weight and the (floored) global
    // variance; the first M-step immediately re-estimates both.
    let mut variances = Array2::<f64>::zeros((k, dim));
    for c in 0..k {
        for j in 0..dim {
            variances[[c, j]] = global_var[j].max(floor[j]);
        }
    }
    GmmModel {
        weights: Array1::from_elem(k, 1.0 / k as f64),
        means,
        variances,
    }
}

struct EStepStats {
    /// Per-component posterior mass.
    nk: Array1<f64>,
    sum_x: Array2<f64>,
    sum_x2: Array2<f64>,
    total_ll: f64,
}

fn e_step(model: &GmmModel, features: ArrayView2<f64>) -> EStepStats {
    let k = model.k();
    let dim = model.dim();
    let mut stats = EStepStats {
        nk: Array1::zeros(k),
        sum_x: Array2::zeros((k, dim)),
        sum_x2: Array2::zeros((k, dim)),
        total_ll: 0.0,
    };
    let n = features.nrows();
    let mut start = 0;
    while start < n {
        let end = (start + E_STEP_CHUNK).min(n);
        let chunk = features.slice(ndarray::s![start..end, ..]);
        let (resp, ll) = responsibilities(model, chunk);
        stats.total_ll += ll;
        for (i, row) in chunk.outer_iter().enumerate() {
            for c in 0..k {
                let r = resp[[i, c]];
                stats.nk[c] += r;
                for j in 0..dim {
                    stats.sum_x[[c, j]] += r * row[j];
                    stats.sum_x2[[c, j]] += r * row[j] * row[j];
                }
            }
        }
        start = end;
    }
    stats
}

fn m_step(
    model: &mut GmmModel,
    stats: &EStepStats,
    features: ArrayView2<f64>,
    floor: &Array1<f64>,
    global_var: &Array1<f64>,
    iteration: usize,
    rng: &mut ChaCha8Rng,
    reseeds: &mut Vec<ReseedEvent>,
) {
    let n = features.nrows() as f64;
    let k = model.k();
    let dim = model.dim();
    for c in 0..k {
        if stats.nk[c] < 1e-8 {
            // Collapsed component: restart it on a random frame with the
            // global variance and a small weight.
            let pick = rng.random_range(0..features.nrows());
            model.means.row_mut(c).assign(&features.row(pick));
            for j in 0..dim {
                model.variances[[c, j]] = global_var[j].max(floor[j]);
            }
            model.weights[c] = 1.0 / n;
            reseeds.push(ReseedEvent {
                iteration,
                component: c,
            });
            continue;
        }
        model.weights[c] = stats.nk[c] / n;
        for j in 0..dim {
            let mean = stats.sum_x[[c, j]] / stats.nk[c];
            let var = stats.sum_x2[[c, j]] / stats.nk[c] - mean * mean;
            model.means[[c, j]] = mean;
            model.variances[[c, j]] = var.max(floor[j]);
        }
    }
    // Re-seeding perturbs the simplex; renormalize.
    let wsum = model.weights.sum();
    model.weights.mapv_inplace(|w| w / wsum);
}

/// Fit a K-component diagonal GMM with a fixed number of EM iterations.
/// Bit-reproducible for a given seed and dataset.
pub fn train_gmm(features: &Array2<f64>, cfg: &GmmTrainConfig) -> Result<TrainedGmm> {
    cfg.validate()?;
    let n = features.nrows();
    if n < cfg.k {
        return Err(Error::Config(format!(
            "{n} frames cannot support {} mixture components",
            cfg.k
        )));
    }
    if features.ncols() == 0 {
        return Err(Error::Config("features must have at least one dimension".into()));
    }
    if features.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric {
            layer: "gmm-input",
            detail: "non-finite feature value".into(),
        });
    }

    let global_var = global_variance(features.view());
    // A strictly positive floor even for constant dimensions.
    let floor = global_var.mapv(|v| (cfg.var_floor_factor * v).max(1e-12));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = initial_model(features.view(), cfg, &floor, &global_var, &mut rng);
    let mut reseeds = Vec::new();
    let mut ll_trace = Vec::with_capacity(cfg.em_iters + 1);

    for iteration in 1..=cfg.em_iters {
        let stats = e_step(&model, features.view());
        ll_trace.push(stats.total_ll);
        m_step(
            &mut model,
            &stats,
            features.view(),
            &floor,
            &global_var,
            iteration,
            &mut rng,
            &mut reseeds,
        );
    }
    // Likelihood of the final parameters.
    let stats = e_step(&model, features.view());
    ll_trace.push(stats.total_ll);

    model.validate()?;
    Ok(TrainedGmm {
        model,
        ll_trace,
        reseeds,
    })
}
