//! Seeded Erdős–Rényi generation.
//!
//! The random stream is ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`)
//! and each candidate arc is accepted by comparing one raw `u64` draw
//! against `floor(p * 2^64)`. No floating-point math happens per pair, so a
//! seed yields the same graph on every platform.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("arc probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("vertex count must be at least 1")]
    NoVertices,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    #[serde(default = "default_directed")]
    pub directed: bool,
}

fn default_directed() -> bool {
    true
}

impl GenSpec {
    pub fn directed(n: usize, p: f64, seed: u64) -> Self {
        GenSpec { n, p, seed, directed: true }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.n == 0 {
            return Err(GenError::NoVertices);
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(GenError::Probability(self.p));
        }
        Ok(())
    }
}

/// Acceptance test for one Bernoulli(p) trial on a raw 64-bit draw.
#[derive(Debug, Clone, Copy)]
enum Threshold {
    Always,
    Below(u64),
}

impl Threshold {
    fn new(p: f64) -> Self {
        if p >= 1.0 {
            Threshold::Always
        } else {
            // 2^64 as f64 is exact; the cast truncates toward zero.
            Threshold::Below((p * 18_446_744_073_709_551_616.0) as u64)
        }
    }

    #[inline]
    fn accept(self, rng: &mut ChaCha8Rng) -> bool {
        let draw = rng.next_u64();
        match self {
            Threshold::Always => true,
            Threshold::Below(t) => draw < t,
        }
    }
}

/// G(n, p): every ordered pair `u != v` becomes an arc independently with
/// probability `p` (directed), or every unordered pair becomes an edge
/// (undirected). Pairs are visited in row-major order.
pub fn erdos_renyi(spec: &GenSpec) -> Result<Graph, GenError> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let thr = Threshold::new(spec.p);
    let mut arcs = Vec::with_capacity((spec.p * (n * n) as f64 * 1.1) as usize + 16);
    for u in 0..n {
        let start = if spec.directed { 0 } else { u + 1 };
        for v in start..n {
            if u != v && thr.accept(&mut rng) {
                arcs.push((u, v));
            }
        }
    }
    let g = if spec.directed {
        Graph::from_arcs(n, arcs)?
    } else {
        Graph::from_edges(n, arcs)?
    };
    Ok(g)
}

/// Derives the `index`-th child seed of `base` (SplitMix64 finalizer).
/// Used to fan one user seed out into graph, init and shuffle streams.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9E37_79B9_7F4A_7C15_u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
