use super::{check_budget, SolveError};
use crate::graph::{Graph, SeedSet};
use crate::neural::Model;

/// Seeds from one forward pass of `model` on `g` followed by top-`k`
/// selection. This is the whole inference step; `d` only matters for the
/// model that was trained for it.
pub fn fastcover_seeds(model: &Model, g: &Graph, k: usize) -> Vec<usize> {
    model.forward(g).top_k(k.min(g.n()))
}

/// [`fastcover_seeds`] with the per-seed marginal gains measured at `d`.
pub fn fastcover(model: &Model, g: &Graph, k: usize, d: usize) -> Result<SeedSet, SolveError> {
    check_budget(g, k, d)?;
    Ok(SeedSet::with_gains(g, fastcover_seeds(model, g, k), d))
}
