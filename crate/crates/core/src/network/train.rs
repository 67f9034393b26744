use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::loss::bce_logit;
use super::{bce_loss, sigmoid, NetworkError, NetworkSpec};
use crate::dataset::Dataset;

/// Samples per gradient chunk. Chunks are reduced in a fixed order, so the
/// result does not depend on the number of worker threads.
const CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EarlyStop {
    pub patience: usize,
    pub min_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_adam: f64,
    pub early_stop: Option<EarlyStop>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 80,
            batch_size: 512,
            learning_rate: 3e-3,
            seed: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps_adam: 1e-8,
            early_stop: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), NetworkError> {
        let bad = |m: &str| Err(NetworkError::Config(m.to_string()));
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if self.batch_size == 0 {
            return bad("batch size must be at least 1");
        }
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return bad("learning rate must be finite and non-negative");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || !(self.eps_adam > 0.0) {
            return bad("Adam parameters out of range");
        }
        if let Some(es) = self.early_stop {
            if es.patience == 0 || !(es.min_delta >= 0.0) {
                return bad("early stopping needs patience ≥ 1 and min_delta ≥ 0");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_bce: f64,
    pub val_bce: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct LossCurve {
    pub records: Vec<EpochRecord>,
    /// Epoch at which early stopping fired, if it did.
    pub stopped_at: Option<usize>,
}

impl LossCurve {
    /// CSV with header `epoch,train_bce[,val_bce]`.
    pub fn to_csv(&self) -> String {
        let with_val = self.records.iter().any(|r| r.val_bce.is_some());
        let mut s = String::from(if with_val { "epoch,train_bce,val_bce\n" } else { "epoch,train_bce\n" });
        for r in &self.records {
            match (with_val, r.val_bce) {
                (true, Some(v)) => s.push_str(&format!("{},{:.8},{:.8}\n", r.epoch, r.train_bce, v)),
                (true, None) => s.push_str(&format!("{},{:.8},\n", r.epoch, r.train_bce)),
                _ => s.push_str(&format!("{},{:.8}\n", r.epoch, r.train_bce)),
            }
        }
        s
    }
}

/// Flat parameter layout: per layer, weights row by row, then biases.
struct Layout {
    rows: Vec<Vec<usize>>,
    bias: Vec<usize>,
    total: usize,
}

impl Layout {
    fn of(spec: &NetworkSpec) -> Layout {
        let mut off = 0;
        let mut rows = Vec::with_capacity(spec.layers.len());
        let mut bias = Vec::with_capacity(spec.layers.len());
        for layer in &spec.layers {
            let mut r = Vec::with_capacity(layer.w.len());
            for row in &layer.w {
                r.push(off);
                off += row.len();
            }
            rows.push(r);
            bias.push(off);
            off += layer.b.len();
        }
        Layout { rows, bias, total: off }
    }
}

pub fn get_params(spec: &NetworkSpec) -> Vec<f64> {
    let mut p = Vec::with_capacity(spec.param_count());
    for layer in &spec.layers {
        for row in &layer.w {
            p.extend_from_slice(row);
        }
        p.extend_from_slice(&layer.b);
    }
    p
}

pub fn set_params(spec: &mut NetworkSpec, params: &[f64]) -> Result<(), NetworkError> {
    if params.len() != spec.param_count() {
        return Err(NetworkError::Shape(format!("{} parameters for a spec with {}", params.len(), spec.param_count())));
    }
    let mut it = params.iter().copied();
    for layer in &mut spec.layers {
        for row in &mut layer.w {
            row.iter_mut().for_each(|w| *w = it.next().unwrap_or(0.0));
        }
        layer.b.iter_mut().for_each(|b| *b = it.next().unwrap_or(0.0));
    }
    Ok(())
}

#[derive(Default)]
struct Scratch {
    a: Vec<Vec<f64>>,
    z: Vec<Vec<f64>>,
    ga: Vec<f64>,
    gprev: Vec<f64>,
}

/// Accumulates the gradient of one sample's logit-space BCE into `grad`.
fn sample_grad(spec: &NetworkSpec, lay: &Layout, x: &[f64], y: bool, grad: &mut [f64], s: &mut Scratch) -> f64 {
    let n = spec.layers.len();
    s.a.resize_with(n + 1, Vec::new);
    s.z.resize_with(n, Vec::new);
    s.a[0].clear();
    s.a[0].extend_from_slice(x);
    for (l, layer) in spec.layers.iter().enumerate() {
        let (head, tail) = s.a.split_at_mut(l + 1);
        layer.pre_activation(&head[l], &mut s.z[l]);
        tail[0].clear();
        tail[0].extend(s.z[l].iter().map(|&v| layer.act.apply(v)));
    }
    let score: f64 = s.a[n].iter().sum();
    let logit = spec.head.scale * (score - spec.head.tau);
    let loss = bce_logit(logit, y);
    let dlogit = sigmoid(logit) - if y { 1.0 } else { 0.0 };

    s.ga.clear();
    s.ga.resize(s.a[n].len(), spec.head.scale * dlogit);
    for l in (0..n).rev() {
        let layer = &spec.layers[l];
        let a_in = &s.a[l];
        let need_prev = l > 0;
        if need_prev {
            s.gprev.clear();
            s.gprev.resize(layer.inputs, 0.0);
        }
        for r in 0..layer.outputs() {
            let gz = s.ga[r] * layer.act.derivative(s.z[l][r], s.a[l + 1][r]);
            if gz == 0.0 {
                continue;
            }
            grad[lay.bias[l] + r] += gz;
            let off = lay.rows[l][r];
            for (k, &w) in layer.w[r].iter().enumerate() {
                let col = layer.column(r, k);
                grad[off + k] += gz * a_in[col];
                if need_prev {
                    s.gprev[col] += w * gz;
                }
            }
        }
        if need_prev {
            std::mem::swap(&mut s.ga, &mut s.gprev);
        }
    }
    loss
}

/// Summed loss and gradient over `idx`, reduced chunk by chunk in index order.
fn summed_grad(spec: &NetworkSpec, lay: &Layout, data: &Dataset, idx: &[usize]) -> (f64, Vec<f64>) {
    let parts: Vec<(f64, Vec<f64>)> = idx
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut g = vec![0.0; lay.total];
            let mut s = Scratch::default();
            let mut loss = 0.0;
            for &i in chunk {
                loss += sample_grad(spec, lay, data.point(i), data.labels()[i], &mut g, &mut s);
            }
            (loss, g)
        })
        .collect();
    let mut total = vec![0.0; lay.total];
    let mut loss = 0.0;
    for (l, g) in parts {
        loss += l;
        total.iter_mut().zip(&g).for_each(|(t, v)| *t += v);
    }
    (loss, total)
}

/// Mean logit-space BCE over the dataset and its gradient with respect to
/// the flat parameters (see [`get_params`]).
pub fn loss_and_gradient(spec: &NetworkSpec, data: &Dataset) -> Result<(f64, Vec<f64>), NetworkError> {
    if data.is_empty() {
        return Err(NetworkError::Empty);
    }
    if data.dim() != spec.input_dim() {
        return Err(NetworkError::Shape(format!("data dimension {} vs spec input {}", data.dim(), spec.input_dim())));
    }
    let lay = Layout::of(spec);
    let idx: Vec<usize> = (0..data.len()).collect();
    let (loss, mut g) = summed_grad(spec, &lay, data, &idx);
    let n = data.len() as f64;
    g.iter_mut().for_each(|v| *v /= n);
    Ok((loss / n, g))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(n: usize) -> Self {
        AdamState { m: vec![0.0; n], v: vec![0.0; n], t: 0 }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64], cfg: &TrainConfig) {
        self.t += 1;
        let t = self.t as i32;
        let c1 = 1.0 - cfg.beta1.powi(t);
        let c2 = 1.0 - cfg.beta2.powi(t);
        for i in 0..params.len() {
            let g = grad[i];
            self.m[i] = cfg.beta1 * self.m[i] + (1.0 - cfg.beta1) * g;
            self.v[i] = cfg.beta2 * self.v[i] + (1.0 - cfg.beta2) * g * g;
            let mhat = self.m[i] / c1;
            let vhat = self.v[i] / c2;
            params[i] -= cfg.learning_rate * mhat / (vhat.sqrt() + cfg.eps_adam);
        }
    }
}

fn dataset_bce(spec: &NetworkSpec, data: &Dataset) -> Result<f64, NetworkError> {
    let pts = data.point_vec();
    let probs: Vec<f64> = spec.forward_batch(&pts)?.iter().map(|o| o.prob).collect();
    bce_loss(&probs, data.labels())
}

/// Trains with mini-batch Adam on BCE.
///
/// With early stopping enabled and no validation set, 10% of `data` is held
/// out by a seeded split. The returned spec is the one at the final epoch.
pub fn train(spec: &NetworkSpec, data: &Dataset, cfg: &TrainConfig) -> Result<(NetworkSpec, LossCurve), NetworkError> {
    if cfg.early_stop.is_some() {
        if data.len() < 2 {
            return Err(NetworkError::Config("early stopping needs at least 2 samples".into()));
        }
        let (rest, held) = data.split(0.1, cfg.seed ^ 0x5eed_5eed_5eed_5eed);
        train_with_validation(spec, &rest, Some(&held), cfg)
    } else {
        train_with_validation(spec, data, None, cfg)
    }
}

pub fn train_with_validation(
    spec: &NetworkSpec,
    data: &Dataset,
    val: Option<&Dataset>,
    cfg: &TrainConfig,
) -> Result<(NetworkSpec, LossCurve), NetworkError> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(NetworkError::Empty);
    }
    if data.dim() != spec.input_dim() {
        return Err(NetworkError::Shape(format!("data dimension {} vs spec input {}", data.dim(), spec.input_dim())));
    }
    let mut net = spec.to_trainable();
    let lay = Layout::of(&net);
    let mut params = get_params(&net);
    let mut adam = AdamState::new(params.len());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut curve = LossCurve::default();
    let mut best = f64::INFINITY;
    let mut wait = 0;

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        for (b, batch) in order.chunks(cfg.batch_size).enumerate() {
            let (loss, mut g) = summed_grad(&net, &lay, data, batch);
            if !loss.is_finite() || g.iter().any(|v| !v.is_finite()) {
                return Err(NetworkError::NonFiniteLoss { epoch, batch: b });
            }
            let n = batch.len() as f64;
            g.iter_mut().for_each(|v| *v /= n);
            adam.step(&mut params, &g, cfg);
            set_params(&mut net, &params)?;
        }
        let train_bce = dataset_bce(&net, data)?;
        let val_bce = val.map(|v| dataset_bce(&net, v)).transpose()?;
        log::debug!("epoch {epoch}: train {train_bce:.6} val {val_bce:?}");
        curve.records.push(EpochRecord { epoch, train_bce, val_bce });

        if let (Some(es), Some(v)) = (cfg.early_stop, val_bce) {
            if v < best - es.min_delta {
                best = v;
                wait = 0;
            } else {
                wait += 1;
                if wait >= es.patience {
                    curve.stopped_at = Some(epoch);
                    break;
                }
            }
        }
    }
    Ok((net, curve))
}
