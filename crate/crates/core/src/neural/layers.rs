use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{FeatureMatrix, MessageGraph, ModelError};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    Grat,
    Gat,
    Gcn,
}

impl Architecture {
    pub fn has_attention(self) -> bool {
        !matches!(self, Architecture::Gcn)
    }

    pub fn name(self) -> &'static str {
        match self {
            Architecture::Grat => "grat",
            Architecture::Gat => "gat",
            Architecture::Gcn => "gcn",
        }
    }

    pub(crate) fn tag(self) -> u8 {
        match self {
            Architecture::Grat => 0,
            Architecture::Gat => 1,
            Architecture::Gcn => 2,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Self> {
        [Architecture::Grat, Architecture::Gat, Architecture::Gcn]
            .into_iter()
            .find(|a| a.tag() == tag)
    }
}

impl std::fmt::Display for Architecture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Architecture {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grat" => Ok(Architecture::Grat),
            "gat" => Ok(Architecture::Gat),
            "gcn" => Ok(Architecture::Gcn),
            _ => Err(format!("unknown architecture {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Identity,
    Relu,
    Sigmoid,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Relu => x.max(0.0),
            Activation::Sigmoid => sigmoid(x),
        }
    }

    /// Derivative at pre-activation `x`.
    #[inline]
    fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => (x > 0.0) as u8 as f64,
            Activation::Sigmoid => {
                let s = sigmoid(x);
                s * (1.0 - s)
            }
        }
    }

    pub(crate) fn tag(self) -> u8 {
        match self {
            Activation::Identity => 0,
            Activation::Relu => 1,
            Activation::Sigmoid => 2,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Self> {
        [Activation::Identity, Activation::Relu, Activation::Sigmoid]
            .into_iter()
            .find(|a| a.tag() == tag)
    }
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Trainable parameters of one layer: `w` is `n_out x n_in` row-major, `a`
/// is the attention vector `[a_src | a_dst]` of length `2 * n_in`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    pub n_in: usize,
    pub n_out: usize,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
    pub a: Option<Vec<f64>>,
}

impl LayerParams {
    pub fn zeros(n_in: usize, n_out: usize, attention: bool) -> Self {
        LayerParams {
            n_in,
            n_out,
            w: vec![0.0; n_in * n_out],
            b: vec![0.0; n_out],
            a: attention.then(|| vec![0.0; 2 * n_in]),
        }
    }

    /// Glorot-uniform `w`, zero bias. The attention vector is drawn from the
    /// non-negative half of its Glorot range: layer inputs are non-negative,
    /// so this starts every `ReLU(a . [h_src | h_dst])` in its active region
    /// instead of leaving some attention heads with zero gradient.
    pub fn glorot<R: Rng>(n_in: usize, n_out: usize, attention: bool, rng: &mut R) -> Self {
        let mut p = Self::zeros(n_in, n_out, attention);
        let limit = (6.0 / (n_in + n_out) as f64).sqrt();
        for x in &mut p.w {
            *x = rng.random_range(-limit..limit);
        }
        if let Some(a) = &mut p.a {
            let limit = (6.0 / (2 * n_in + 1) as f64).sqrt();
            for x in a {
                *x = rng.random_range(0.0..limit);
            }
        }
        p
    }

    /// `n_in * n_out + n_out`, plus `2 * n_in` with attention.
    pub fn param_count(&self) -> usize {
        self.w.len() + self.b.len() + self.a.as_ref().map_or(0, Vec::len)
    }

    /// Parameters in storage order: `w`, `b`, then `a`.
    pub fn values(&self) -> impl Iterator<Item = &f64> {
        self.w.iter().chain(&self.b).chain(self.a.iter().flatten())
    }

    pub fn values_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.w.iter_mut().chain(&mut self.b).chain(self.a.iter_mut().flatten())
    }

    #[inline]
    fn w_row(&self, o: usize) -> &[f64] {
        &self.w[o * self.n_in..(o + 1) * self.n_in]
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Intermediate values kept for the backward pass.
#[derive(Debug, Clone)]
pub(crate) struct LayerCache {
    input: FeatureMatrix,
    /// `W h` per vertex.
    z: FeatureMatrix,
    /// Raw attention logits `a . [h_src | h_dst]` per arc (attention only).
    logits: Vec<f64>,
    /// Mixing coefficient per arc.
    coef: Vec<f64>,
    pre: FeatureMatrix,
}

impl LayerCache {
    /// Pre-activation values, row-major.
    pub(crate) fn pre_values(&self) -> Vec<f64> {
        self.pre.data().to_vec()
    }
}

/// Softmax of `ReLU(logits)` over each group of arc ids, written into `coef`.
fn grouped_softmax<I, G>(groups: G, logits: &[f64], coef: &mut [f64])
where
    G: Iterator<Item = I>,
    I: Iterator<Item = usize> + Clone,
{
    for group in groups {
        let max = group.clone().map(|e| logits[e].max(0.0)).fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            continue;
        }
        let mut total = 0.0;
        for e in group.clone() {
            let x = (logits[e].max(0.0) - max).exp();
            coef[e] = x;
            total += x;
        }
        for e in group {
            coef[e] /= total;
        }
    }
}

fn check_dims(params: &LayerParams, arch: Architecture, mg: &MessageGraph, h: &FeatureMatrix) -> Result<(), ModelError> {
    if h.cols() != params.n_in {
        return Err(ModelError::Dimension { expected: params.n_in, got: h.cols() });
    }
    if h.rows() != mg.n() {
        return Err(ModelError::Dimension { expected: mg.n(), got: h.rows() });
    }
    let want_a = if arch.has_attention() { 2 * params.n_in } else { 0 };
    let got_a = params.a.as_ref().map_or(0, Vec::len);
    if want_a != got_a || params.w.len() != params.n_in * params.n_out || params.b.len() != params.n_out {
        return Err(ModelError::Dimension { expected: want_a, got: got_a });
    }
    Ok(())
}

/// Per-arc mixing coefficients: attention weights for GRAT/GAT, degree
/// normalization for GCN. Also returns the raw attention logits.
pub(crate) fn coefficients(
    arch: Architecture,
    params: &LayerParams,
    mg: &MessageGraph,
    h: &FeatureMatrix,
) -> (Vec<f64>, Vec<f64>) {
    let m = mg.num_edges();
    let mut coef = vec![0.0; m];
    match arch {
        Architecture::Gcn => {
            for (e, c) in coef.iter_mut().enumerate() {
                let deg = mg.out_degree(mg.src(e)) * mg.in_degree(mg.dst(e));
                *c = 1.0 / (deg as f64).sqrt();
            }
            (coef, Vec::new())
        }
        Architecture::Grat | Architecture::Gat => {
            let a = params.a.as_ref().expect("attention layer without attention vector");
            let (a_src, a_dst) = a.split_at(params.n_in);
            let ps: Vec<f64> = (0..mg.n()).map(|w| dot(a_src, h.row(w))).collect();
            let pd: Vec<f64> = (0..mg.n()).map(|u| dot(a_dst, h.row(u))).collect();
            let logits: Vec<f64> = (0..m).map(|e| ps[mg.src(e)] + pd[mg.dst(e)]).collect();
            if arch == Architecture::Grat {
                grouped_softmax((0..mg.n()).map(|w| mg.outgoing(w)), &logits, &mut coef);
            } else {
                grouped_softmax((0..mg.n()).map(|u| mg.incoming(u)), &logits, &mut coef);
            }
            (coef, logits)
        }
    }
}

/// `W h` per vertex, computed as a sum of scaled columns of `W` so the inner
/// loop runs over independent outputs and vectorizes.
fn transform(params: &LayerParams, h: &FeatureMatrix) -> FeatureMatrix {
    let n_out = params.n_out;
    let w_t: Vec<f64> = (0..params.n_in)
        .flat_map(|i| (0..n_out).map(move |o| params.w[o * params.n_in + i]))
        .collect();
    let mut z = FeatureMatrix::zeros(h.rows(), n_out);
    for w in 0..h.rows() {
        let zw = z.row_mut(w);
        for (&hi, col) in h.row(w).iter().zip(w_t.chunks_exact(n_out)) {
            for (zo, &wv) in zw.iter_mut().zip(col) {
                *zo += hi * wv;
            }
        }
    }
    z
}

/// Pre-activation `b + sum_e coef_e z_src(e)` over the arcs into each vertex.
fn aggregate(params: &LayerParams, mg: &MessageGraph, z: &FeatureMatrix, coef: &[f64]) -> FeatureMatrix {
    let mut pre = FeatureMatrix::zeros(mg.n(), params.n_out);
    for u in 0..mg.n() {
        let row = pre.row_mut(u);
        row.copy_from_slice(&params.b);
        for e in mg.incoming(u) {
            let c = coef[e];
            for (acc, zv) in row.iter_mut().zip(z.row(mg.src(e))) {
                *acc += c * zv;
            }
        }
    }
    pre
}

/// Pre-activation values of one layer without keeping anything for the
/// backward pass.
pub(crate) fn forward_pre(arch: Architecture, params: &LayerParams, mg: &MessageGraph, h: &FeatureMatrix) -> FeatureMatrix {
    let z = transform(params, h);
    let (coef, _) = coefficients(arch, params, mg, h);
    aggregate(params, mg, &z, &coef)
}

pub(crate) fn activate(mut pre: FeatureMatrix, act: Activation) -> FeatureMatrix {
    for x in pre.data_mut() {
        *x = act.apply(*x);
    }
    pre
}

pub(crate) fn forward_cached(
    arch: Architecture,
    params: &LayerParams,
    mg: &MessageGraph,
    h: &FeatureMatrix,
    act: Activation,
) -> (FeatureMatrix, LayerCache) {
    let z = transform(params, h);
    let (coef, logits) = coefficients(arch, params, mg, h);
    let pre = aggregate(params, mg, &z, &coef);
    let out = activate(pre.clone(), act);
    let cache = LayerCache { input: h.clone(), z, logits, coef, pre };
    (out, cache)
}

/// Backpropagates `d_out` (gradient w.r.t. this layer's output) through one
/// layer. Returns parameter gradients and, if requested, the gradient w.r.t.
/// the layer input.
pub(crate) fn backward_cached(
    arch: Architecture,
    params: &LayerParams,
    mg: &MessageGraph,
    cache: &LayerCache,
    act: Activation,
    d_out: &FeatureMatrix,
    want_input_grad: bool,
) -> (LayerParams, Option<FeatureMatrix>) {
    let n = mg.n();
    let (n_in, n_out) = (params.n_in, params.n_out);
    let h = &cache.input;
    let mut grads = LayerParams::zeros(n_in, n_out, params.a.is_some());

    let mut d_pre = FeatureMatrix::zeros(n, n_out);
    for u in 0..n {
        for ((g, &dy), &x) in d_pre.row_mut(u).iter_mut().zip(d_out.row(u)).zip(cache.pre.row(u)) {
            *g = dy * act.derivative(x);
        }
        for (gb, &g) in grads.b.iter_mut().zip(d_pre.row(u)) {
            *gb += g;
        }
    }

    // pre_u = b + sum_e coef_e z_src(e)
    let mut d_z = FeatureMatrix::zeros(n, n_out);
    let mut d_coef = vec![0.0; mg.num_edges()];
    for u in 0..n {
        let gu = d_pre.row(u);
        for e in mg.incoming(u) {
            let w = mg.src(e);
            d_coef[e] = dot(gu, cache.z.row(w));
            let c = cache.coef[e];
            for (dz, &g) in d_z.row_mut(w).iter_mut().zip(gu) {
                *dz += c * g;
            }
        }
    }

    // z_w = W h_w
    let mut d_h = want_input_grad.then(|| FeatureMatrix::zeros(n, n_in));
    for w in 0..n {
        let hw = h.row(w);
        let dzw = d_z.row(w);
        for (o, &g) in dzw.iter().enumerate() {
            if g == 0.0 {
                continue;
            }
            for (gw, &x) in grads.w[o * n_in..(o + 1) * n_in].iter_mut().zip(hw) {
                *gw += g * x;
            }
        }
        if let Some(d_h) = d_h.as_mut() {
            let row = d_h.row_mut(w);
            for (o, &g) in dzw.iter().enumerate() {
                for (dh, &wv) in row.iter_mut().zip(params.w_row(o)) {
                    *dh += g * wv;
                }
            }
        }
    }

    if arch.has_attention() {
        // coef = softmax(ReLU(logits)) per group; logits_e = a_src.h_src + a_dst.h_dst
        let mut d_logit = vec![0.0; mg.num_edges()];
        let softmax_back = |group: &mut dyn Iterator<Item = usize>, d_logit: &mut [f64]| {
            let ids: Vec<usize> = group.collect();
            let inner: f64 = ids.iter().map(|&e| cache.coef[e] * d_coef[e]).sum();
            for &e in &ids {
                let d_relu = cache.coef[e] * (d_coef[e] - inner);
                d_logit[e] = if cache.logits[e] > 0.0 { d_relu } else { 0.0 };
            }
        };
        for v in 0..n {
            if arch == Architecture::Grat {
                softmax_back(&mut mg.outgoing(v), &mut d_logit);
            } else {
                softmax_back(&mut mg.incoming(v), &mut d_logit);
            }
        }
        let mut by_src = vec![0.0; n];
        let mut by_dst = vec![0.0; n];
        for (e, &g) in d_logit.iter().enumerate() {
            by_src[mg.src(e)] += g;
            by_dst[mg.dst(e)] += g;
        }
        let a = params.a.as_ref().expect("attention vector");
        let ga = grads.a.as_mut().expect("attention gradient");
        for v in 0..n {
            let hv = h.row(v);
            for i in 0..n_in {
                ga[i] += by_src[v] * hv[i];
                ga[n_in + i] += by_dst[v] * hv[i];
            }
            if let Some(d_h) = d_h.as_mut() {
                let row = d_h.row_mut(v);
                for i in 0..n_in {
                    row[i] += by_src[v] * a[i] + by_dst[v] * a[n_in + i];
                }
            }
        }
    }
    (grads, d_h)
}

/// One message-passing layer of the given architecture on `mg`.
pub fn layer_forward(
    arch: Architecture,
    params: &LayerParams,
    mg: &MessageGraph,
    h: &FeatureMatrix,
    act: Activation,
) -> Result<FeatureMatrix, ModelError> {
    check_dims(params, arch, mg, h)?;
    Ok(activate(forward_pre(arch, params, mg, h), act))
}

/// Reversed-attention layer on `g_rev` exactly as given (no self-loops are
/// added): `h'_u = act(sum_{w -> u} alpha_wu W h_w + b)` with `alpha`
/// normalized over each source's successors.
pub fn grat_layer(params: &LayerParams, g_rev: &Graph, h: &FeatureMatrix, act: Activation) -> Result<FeatureMatrix, ModelError> {
    layer_forward(Architecture::Grat, params, &MessageGraph::new(g_rev, false), h, act)
}

/// Like [`grat_layer`] with attention normalized over each destination's
/// predecessors.
pub fn gat_layer(params: &LayerParams, g_rev: &Graph, h: &FeatureMatrix, act: Activation) -> Result<FeatureMatrix, ModelError> {
    layer_forward(Architecture::Gat, params, &MessageGraph::new(g_rev, false), h, act)
}

/// Degree-normalized convolution on `g_rev` with a self-loop on every
/// vertex.
pub fn gcn_layer(params: &LayerParams, g_rev: &Graph, h: &FeatureMatrix, act: Activation) -> Result<FeatureMatrix, ModelError> {
    layer_forward(Architecture::Gcn, params, &MessageGraph::new(g_rev, true), h, act)
}

/// Per-arc mixing coefficients of a layer, in [`MessageGraph`] arc order.
pub fn attention_coefficients(
    arch: Architecture,
    params: &LayerParams,
    mg: &MessageGraph,
    h: &FeatureMatrix,
) -> Result<Vec<f64>, ModelError> {
    check_dims(params, arch, mg, h)?;
    Ok(coefficients(arch, params, mg, h).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_params(n_in: usize, n_out: usize, attention: bool, seed: u64) -> LayerParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = LayerParams::glorot(n_in, n_out, attention, &mut rng);
        for b in &mut p.b {
            *b = rng.random_range(-0.5..0.5);
        }
        p
    }

    #[test]
    fn singleton_softmax_and_empty_sum() {
        // g_rev: 0 -> 1, 2 isolated.
        let g_rev = Graph::from_arcs(3, [(0, 1)]).unwrap();
        let p = random_params(2, 3, true, 1);
        let h = FeatureMatrix::from_vec(3, 2, vec![0.3, -1.0, 0.7, 0.2, -0.4, 0.9]);
        let mg = MessageGraph::new(&g_rev, false);
        let coef = attention_coefficients(Architecture::Grat, &p, &mg, &h).unwrap();
        assert_eq!(coef, vec![1.0]);
        let out = grat_layer(&p, &g_rev, &h, Activation::Sigmoid).unwrap();
        for u in [0, 2] {
            for o in 0..3 {
                assert_eq!(out.row(u)[o], sigmoid(p.b[o]));
            }
        }
        let gat = gat_layer(&p, &g_rev, &h, Activation::Sigmoid).unwrap();
        assert_eq!(gat.row(2), out.row(2));
    }

    #[test]
    fn gcn_isolated_vertex_sees_itself() {
        let g_rev = Graph::from_arcs(3, [(0, 1)]).unwrap();
        let p = random_params(2, 2, false, 2);
        let h = FeatureMatrix::from_vec(3, 2, vec![0.3, -1.0, 0.7, 0.2, -0.4, 0.9]);
        let out = gcn_layer(&p, &g_rev, &h, Activation::Identity).unwrap();
        for o in 0..2 {
            let expect = dot(p.w_row(o), h.row(2)) + p.b[o];
            assert!((out.row(2)[o] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn gcn_regular_graph_uniform_rows() {
        let cycle = Graph::from_arcs(6, (0..6).map(|i| (i, (i + 1) % 6))).unwrap();
        let p = random_params(1, 4, false, 3);
        let h = crate::neural::init_features(&cycle);
        let out = gcn_layer(&p, &cycle.reverse(), &h, Activation::Relu).unwrap();
        for u in 1..6 {
            assert_eq!(out.row(u), out.row(0));
        }
    }

    #[test]
    fn dimension_mismatch() {
        let g = Graph::from_arcs(2, [(0, 1)]).unwrap();
        let p = random_params(3, 2, true, 4);
        let h = FeatureMatrix::zeros(2, 2);
        assert!(matches!(
            grat_layer(&p, &g, &h, Activation::Relu),
            Err(ModelError::Dimension { expected: 3, got: 2 })
        ));
        let gcn_params = random_params(2, 2, false, 5);
        assert!(grat_layer(&gcn_params, &g, &h, Activation::Relu).is_err());
    }

    #[test]
    fn param_counts() {
        assert_eq!(LayerParams::zeros(1, 32, true).param_count(), 66);
        assert_eq!(LayerParams::zeros(32, 32, true).param_count(), 1120);
        assert_eq!(LayerParams::zeros(32, 1, true).param_count(), 97);
        assert_eq!(LayerParams::zeros(32, 1, false).param_count(), 33);
    }
}
