use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{backward, Architecture, Gradients, MessageGraph, Model, ModelError};
use crate::gen::derive_seed;
use crate::graph::{coverage_rate, Graph};
use crate::solvers::{CoverageIndex, Limits};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

impl std::str::FromStr for OptimizerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sgd" => Ok(OptimizerKind::Sgd),
            "adam" => Ok(OptimizerKind::Adam),
            _ => Err(format!("unknown optimizer {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub arch: Architecture,
    pub d: usize,
    /// Budget used for the validation coverage that drives early stopping.
    pub k_eval: usize,
    pub lr: f64,
    pub max_epochs: usize,
    pub patience: usize,
    pub lambda: f64,
    pub seed: u64,
    pub optimizer: OptimizerKind,
    /// Layer widths including the 1-dim input and the 1-dim output.
    pub dims: Vec<usize>,
    /// Where reversed coverage indices are cached between runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
}

impl TrainConfig {
    pub fn new(arch: Architecture, d: usize) -> Self {
        TrainConfig {
            arch,
            d,
            k_eval: Self::default_k_eval(d),
            lr: 1.0,
            max_epochs: 20,
            patience: 5,
            lambda: 1.0,
            seed: 0,
            optimizer: OptimizerKind::Sgd,
            dims: Model::STANDARD_DIMS.to_vec(),
            cache_dir: None,
        }
    }

    /// 64, 16 and 4 seeds for d = 1, 2 and 3 or more.
    pub fn default_k_eval(d: usize) -> usize {
        match d {
            0 | 1 => 64,
            2 => 16,
            _ => 4,
        }
    }
}

/// Patience-based stopping on a score where larger is better. Only strict
/// improvements reset the counter.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: usize,
    best: Option<f64>,
    best_epoch: usize,
    stale: usize,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> Self {
        EarlyStopping { patience, best: None, best_epoch: 0, stale: 0 }
    }

    /// Records the score of `epoch`; returns true if it is the new best.
    pub fn observe(&mut self, epoch: usize, score: f64) -> bool {
        if self.best.is_none_or(|b| score > b) {
            self.best = Some(score);
            self.best_epoch = epoch;
            self.stale = 0;
            true
        } else {
            self.stale += 1;
            false
        }
    }

    pub fn should_stop(&self) -> bool {
        self.stale >= self.patience
    }

    pub fn best(&self) -> Option<f64> {
        self.best
    }

    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean per-vertex training loss before each step.
    pub train_loss: f64,
    pub val_coverage: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters from the epoch with the best validation coverage.
    pub model: Model,
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_val_coverage: f64,
}

impl TrainOutcome {
    pub fn epochs_run(&self) -> usize {
        self.history.len()
    }
}

/// Index of the vertices that cover each `u` within `d` hops, i.e. the
/// d-coverage index of the reversed graph, optionally cached in `cache_dir`.
pub fn coverers_index(g: &Graph, d: usize, cache_dir: Option<&Path>) -> CoverageIndex {
    CoverageIndex::cached(&g.reverse(), d, cache_dir, &Limits::none()).expect("no limits configured")
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(len: usize) -> Self {
        Adam { m: vec![0.0; len], v: vec![0.0; len], t: 0 }
    }
}

enum Optimizer {
    Sgd,
    Adam(Adam),
}

impl Optimizer {
    fn step(&mut self, model: &mut Model, grads: &Gradients, lr: f64) {
        let grads = grads.iter().flat_map(|l| l.values());
        match self {
            Optimizer::Sgd => {
                for (x, g) in model.params_mut().zip(grads) {
                    *x -= lr * g;
                }
            }
            Optimizer::Adam(state) => {
                state.t += 1;
                let c1 = 1.0 - Adam::BETA1.powi(state.t);
                let c2 = 1.0 - Adam::BETA2.powi(state.t);
                let moments = state.m.iter_mut().zip(state.v.iter_mut());
                for ((x, g), (m, v)) in model.params_mut().zip(grads).zip(moments) {
                    *m = Adam::BETA1 * *m + (1.0 - Adam::BETA1) * g;
                    *v = Adam::BETA2 * *v + (1.0 - Adam::BETA2) * g * g;
                    *x -= lr * (*m / c1) / ((*v / c2).sqrt() + Adam::EPS);
                }
            }
        }
    }
}

/// Shifts the output bias so the mean initial logit is the logit of the
/// best constant probability `q` on the training graphs. The loss is convex
/// in a constant `q`, so a ternary search finds it.
fn calibrate_output_bias(model: &mut Model, prepared: &[(MessageGraph, CoverageIndex)], lambda: f64) {
    let total = |q: f64| -> f64 {
        prepared.iter().map(|(mg, idx)| super::loss(&vec![q; mg.n()], idx, lambda) / mg.n() as f64).sum()
    };
    let (mut lo, mut hi) = (super::CLAMP_EPS, 1.0 - super::CLAMP_EPS);
    for _ in 0..100 {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if total(a) <= total(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let q = 0.5 * (lo + hi);
    let target = (q / (1.0 - q)).ln();
    let (sum, count) = prepared.iter().fold((0.0, 0usize), |(s, c), (mg, _)| {
        let logits = model.forward_prepared(mg).logits;
        (s + logits.iter().sum::<f64>(), c + logits.len())
    });
    let mean = sum / count as f64;
    model.layers.last_mut().expect("model has layers").b[0] += target - mean;
}

/// Mean coverage rate of the top-`k` vertices over `graphs`.
pub fn mean_top_k_coverage(model: &Model, graphs: &[Graph], d: usize, k: usize) -> f64 {
    let total: f64 = graphs
        .iter()
        .map(|g| {
            let seeds = model.forward(g).top_k(k.min(g.n()));
            coverage_rate(g, &seeds, d)
        })
        .sum();
    total / graphs.len() as f64
}

/// Trains a fresh model. The last quarter of `graphs` (at least one) is held
/// out for validation and the rest is used for one full-batch step per graph
/// per epoch, visited in a seeded random order. The loss is averaged over
/// vertices so the step size does not depend on graph size, and the output
/// bias starts at the best constant score (see `calibrate_output_bias`) so
/// early steps are spent separating vertices rather than shrinking all
/// scores at once.
pub fn train(config: &TrainConfig, graphs: &[Graph]) -> Result<TrainOutcome, ModelError> {
    if graphs.len() < 2 {
        return Err(ModelError::NotEnoughGraphs { needed: 2, got: graphs.len() });
    }
    let n_val = (graphs.len() / 4).max(1);
    let (train_graphs, val_graphs) = graphs.split_at(graphs.len() - n_val);

    let prepared: Vec<(MessageGraph, CoverageIndex)> = train_graphs
        .iter()
        .map(|g| (MessageGraph::for_scoring(g), coverers_index(g, config.d, config.cache_dir.as_deref())))
        .collect();

    let mut model = Model::new(config.arch, &config.dims, config.seed);
    calibrate_output_bias(&mut model, &prepared, config.lambda);
    model.validate()?;
    let mut optimizer = match config.optimizer {
        OptimizerKind::Sgd => Optimizer::Sgd,
        OptimizerKind::Adam => Optimizer::Adam(Adam::new(model.param_count())),
    };
    let mut order_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 1));
    let mut order: Vec<usize> = (0..prepared.len()).collect();

    let mut stopping = EarlyStopping::new(config.patience);
    let mut best = model.clone();
    let mut history = Vec::new();
    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut order_rng);
        let mut loss_sum = 0.0;
        for &i in &order {
            let (mg, coverers) = &prepared[i];
            let scale = 1.0 / mg.n() as f64;
            let (value, mut grads) = backward(&model, mg, coverers, config.lambda);
            for x in grads.iter_mut().flat_map(|l| l.values_mut()) {
                *x *= scale;
            }
            optimizer.step(&mut model, &grads, config.lr);
            loss_sum += value * scale;
        }
        let val_coverage = mean_top_k_coverage(&model, val_graphs, config.d, config.k_eval);
        history.push(EpochRecord { epoch, train_loss: loss_sum / prepared.len() as f64, val_coverage });
        if stopping.observe(epoch, val_coverage) {
            best = model.clone();
        }
        if stopping.should_stop() {
            break;
        }
    }
    Ok(TrainOutcome {
        model: best,
        best_epoch: stopping.best_epoch(),
        best_val_coverage: stopping.best().unwrap_or(0.0),
        history,
    })
}
