use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::layers::{activate, backward_cached, forward_cached, forward_pre, LayerCache};
use super::{loss_gradient, Activation, Architecture, FeatureMatrix, LayerParams, MessageGraph, ModelError};
use crate::graph::Graph;
use crate::solvers::{top_k_by_score, CoverageIndex};

/// Per-vertex selection scores. `p` are the sigmoid outputs, `logits` the
/// values before the output activation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    pub p: Vec<f64>,
    pub logits: Vec<f64>,
}

impl ScoreVector {
    /// Seeds for budget `k`, best first. Ranks by logit: the order is the
    /// same as by `p` wherever the sigmoid has not rounded to 0 or 1.
    pub fn top_k(&self, k: usize) -> Vec<usize> {
        top_k_by_score(&self.logits, k)
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// Gradients in the same shape as [`Model::layers`].
pub type Gradients = Vec<LayerParams>;

/// A stack of message-passing layers ending in a single sigmoid output.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub arch: Architecture,
    pub layers: Vec<LayerParams>,
    pub hidden: Activation,
    pub output: Activation,
}

impl Model {
    /// One input feature, two hidden layers of 32 units, one output.
    pub const STANDARD_DIMS: [usize; 4] = [1, 32, 32, 1];

    /// Glorot-initialized model with ReLU hidden layers and sigmoid output.
    pub fn new(arch: Architecture, dims: &[usize], seed: u64) -> Self {
        assert!(dims.len() >= 2, "need at least one layer");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = dims
            .windows(2)
            .map(|w| LayerParams::glorot(w[0], w[1], arch.has_attention(), &mut rng))
            .collect();
        Model { arch, layers, hidden: Activation::Relu, output: Activation::Sigmoid }
    }

    pub fn standard(arch: Architecture, seed: u64) -> Self {
        Self::new(arch, &Self::STANDARD_DIMS, seed)
    }

    /// Checks that layer shapes chain, end in one output and match `arch`.
    pub fn validate(&self) -> Result<(), ModelError> {
        let Some(last) = self.layers.last() else {
            return Err(ModelError::Corrupt("model has no layers".into()));
        };
        if last.n_out != 1 {
            return Err(ModelError::Dimension { expected: 1, got: last.n_out });
        }
        for pair in self.layers.windows(2) {
            if pair[0].n_out != pair[1].n_in {
                return Err(ModelError::Dimension { expected: pair[0].n_out, got: pair[1].n_in });
            }
        }
        for l in &self.layers {
            let want_a = if self.arch.has_attention() { 2 * l.n_in } else { 0 };
            let got_a = l.a.as_ref().map_or(0, Vec::len);
            if want_a != got_a || l.w.len() != l.n_in * l.n_out || l.b.len() != l.n_out {
                return Err(ModelError::Dimension { expected: want_a, got: got_a });
            }
        }
        Ok(())
    }

    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.input_dim()).chain(self.layers.iter().map(|l| l.n_out)).collect()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].n_in
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(LayerParams::param_count).sum()
    }

    fn activation(&self, layer: usize) -> Activation {
        if layer + 1 == self.layers.len() {
            self.output
        } else {
            self.hidden
        }
    }

    /// Scores every vertex of the original graph `g` with one pass over its
    /// reversal (plus self-loops).
    pub fn forward(&self, g: &Graph) -> ScoreVector {
        self.forward_prepared(&MessageGraph::for_scoring(g))
    }

    pub fn forward_prepared(&self, mg: &MessageGraph) -> ScoreVector {
        let mut h = FeatureMatrix::filled(mg.n(), self.input_dim(), 1.0);
        let mut logits = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            let pre = forward_pre(self.arch, layer, mg, &h);
            if i + 1 == self.layers.len() {
                logits = pre.data().to_vec();
            }
            h = activate(pre, self.activation(i));
        }
        ScoreVector { p: h.into_vec(), logits }
    }

    pub(crate) fn forward_cached(&self, mg: &MessageGraph) -> (ScoreVector, Vec<LayerCache>) {
        let mut h = FeatureMatrix::filled(mg.n(), self.input_dim(), 1.0);
        let mut caches = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate() {
            let (out, cache) = forward_cached(self.arch, layer, mg, &h, self.activation(i));
            caches.push(cache);
            h = out;
        }
        let logits = caches.last().map(LayerCache::pre_values).unwrap_or_default();
        (ScoreVector { p: h.into_vec(), logits }, caches)
    }

    /// All parameters, layer by layer, each layer in `w`, `b`, `a` order.
    pub fn params(&self) -> impl Iterator<Item = &f64> {
        self.layers.iter().flat_map(LayerParams::values)
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers.iter_mut().flat_map(LayerParams::values_mut)
    }
}

/// Loss and exact gradients of every parameter.
///
/// `mg` is the scoring view of the graph ([`MessageGraph::for_scoring`]) and
/// `coverers` the d-hop coverage index of the reversed graph.
pub fn backward(
    model: &Model,
    mg: &MessageGraph,
    coverers: &CoverageIndex,
    lambda: f64,
) -> (f64, Gradients) {
    let (scores, caches) = model.forward_cached(mg);
    let (value, d_p) = loss_gradient(&scores.p, coverers, lambda);
    let mut d_out = FeatureMatrix::from_vec(mg.n(), 1, d_p);
    let mut grads = vec![LayerParams::zeros(0, 0, false); model.layers.len()];
    for i in (0..model.layers.len()).rev() {
        let (g, d_in) = backward_cached(
            model.arch,
            &model.layers[i],
            mg,
            &caches[i],
            model.activation(i),
            &d_out,
            i > 0,
        );
        grads[i] = g;
        if let Some(d_in) = d_in {
            d_out = d_in;
        }
    }
    (value, grads)
}
