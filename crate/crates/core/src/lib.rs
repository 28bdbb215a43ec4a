//! Solvers for the budget-constrained d-hop dominating set problem: pick at
//! most `k` seed vertices so that as many vertices as possible lie within
//! `d` directed hops of some seed.
//!
//! * [`graph`] stores graphs and evaluates multi-hop coverage.
//! * [`gen`] produces seeded Erdős–Rényi instances.
//! * [`solvers`] holds the greedy family (plain, lazy/CELF, 1-hop), an
//!   exhaustive oracle and score-based top-k selection.
//! * [`neural`] implements the reversed-attention scorer (plus GAT and GCN
//!   variants), its probabilistic coverage loss, gradients and training.
//! * [`bench`] runs solver grids and writes CSV results.

pub mod bench;
pub mod gen;
pub mod graph;
pub mod neural;
pub mod solvers;
