//! The learned scorer: a small graph network run on the reversed graph that
//! assigns every vertex a selection probability in one forward pass, plus
//! the probabilistic coverage loss it is trained with.
//!
//! Three layer types share one message-passing skeleton:
//!
//! * **GRAT** (reversed attention): attention logits are normalized over
//!   each *source* vertex's outgoing arcs, so a vertex splits its "reward
//!   for being covered" among everyone that covers it.
//! * **GAT**: the usual normalization over each *destination*'s incoming
//!   arcs.
//! * **GCN**: fixed `1 / sqrt(out_deg(src) * in_deg(dst))` weights.
//!
//! Gradients are derived by hand; see [`backward`].

mod io;
mod layers;
mod loss;
mod matrix;
mod message;
mod model;
mod train;

use thiserror::Error;

pub use io::{load_model, read_model, save_model, write_model, FORMAT_VERSION, MAGIC};
pub use layers::{
    attention_coefficients, gat_layer, gcn_layer, grat_layer, layer_forward, Activation, Architecture,
    LayerParams,
};
pub use loss::{loss, loss_gradient, CLAMP_EPS};
pub use matrix::{init_features, FeatureMatrix};
pub use message::MessageGraph;
pub use model::{backward, Gradients, Model, ScoreVector};
pub use train::{
    coverers_index, mean_top_k_coverage, train, EarlyStopping, EpochRecord, OptimizerKind, TrainConfig, TrainOutcome,
};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("not a model file (bad magic bytes)")]
    BadMagic,
    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u32),
    #[error("corrupt model file: {0}")]
    Corrupt(String),
    #[error("need at least {needed} graphs for training, got {got}")]
    NotEnoughGraphs { needed: usize, got: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
