use fixedbitset::FixedBitSet;

use super::{check_budget, Limits, SolveError};
use crate::graph::{Bfs, Graph, SeedSet};

/// Plain greedy: every round re-runs a depth-`d` BFS from each vertex and
/// counts the vertices it would newly cover, then takes the best one.
pub fn naive_greedy(g: &Graph, k: usize, d: usize, limits: &Limits) -> Result<SeedSet, SolveError> {
    check_budget(g, k, d)?;
    let deadline = limits.start();
    let n = g.n();
    let mut bfs = Bfs::new(n);
    let mut covered = FixedBitSet::with_capacity(n);
    let mut count = 0;
    let mut result = SeedSet::default();
    while result.len() < k && count < n {
        let mut best = (0usize, usize::MAX);
        for u in 0..n {
            let gain = bfs
                .run(g, &[u], d)
                .iter()
                .filter(|&&v| !covered.contains(v as usize))
                .count();
            // Strict comparison keeps the smallest id among ties.
            if gain > best.0 {
                best = (gain, u);
            }
        }
        deadline.check()?;
        let (gain, u) = best;
        if gain == 0 {
            break;
        }
        for &v in bfs.run(g, &[u], d) {
            covered.insert(v as usize);
        }
        count += gain;
        result.seeds.push(u);
        result.gains.push(gain);
    }
    Ok(result)
}
