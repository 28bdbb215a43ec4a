//! Lazy-forward greedy (CELF).
//!
//! Coverage is submodular, so a marginal gain computed in an earlier round
//! is an upper bound on the current one. The queue head is re-evaluated
//! only when stale; if it is fresh no other vertex can beat it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use fixedbitset::FixedBitSet;

use super::{check_budget, CoverageIndex, Deadline, Limits, SolveError};
use crate::graph::{Bfs, Graph, SeedSet};

/// A vertex with a cached marginal gain, stamped with the number of seeds
/// that had been selected when the gain was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LazyQueueEntry {
    pub vertex: usize,
    pub gain: usize,
    pub round: usize,
}

impl Ord for LazyQueueEntry {
    // Max-heap order: larger gain first, then smaller vertex id.
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .cmp(&other.gain)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for LazyQueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Marginal-gain bookkeeping for one coverage model.
trait Marginals {
    fn gain(&self, u: usize) -> usize;
    /// Marks everything `u` covers; returns how many vertices were new.
    fn select(&mut self, u: usize) -> usize;
    fn all_covered(&self) -> bool;
}

/// 1-hop coverage read straight off the adjacency lists.
struct ClosedNeighbourhood<'g> {
    g: &'g Graph,
    covered: FixedBitSet,
    count: usize,
}

impl<'g> ClosedNeighbourhood<'g> {
    fn new(g: &'g Graph) -> Self {
        ClosedNeighbourhood { g, covered: FixedBitSet::with_capacity(g.n()), count: 0 }
    }
}

impl Marginals for ClosedNeighbourhood<'_> {
    fn gain(&self, u: usize) -> usize {
        let own = !self.covered.contains(u) as usize;
        own + self
            .g
            .successor_slice(u)
            .iter()
            .filter(|&&v| !self.covered.contains(v as usize))
            .count()
    }

    fn select(&mut self, u: usize) -> usize {
        let mut new = !self.covered.put(u) as usize;
        for &v in self.g.successor_slice(u) {
            new += !self.covered.put(v as usize) as usize;
        }
        self.count += new;
        new
    }

    fn all_covered(&self) -> bool {
        self.count == self.g.n()
    }
}

/// d-hop coverage read from a precomputed index.
struct IndexedCoverage<'i> {
    index: &'i CoverageIndex,
    covered: FixedBitSet,
    count: usize,
}

impl Marginals for IndexedCoverage<'_> {
    fn gain(&self, u: usize) -> usize {
        self.index
            .coverage(u)
            .iter()
            .filter(|&&v| !self.covered.contains(v as usize))
            .count()
    }

    fn select(&mut self, u: usize) -> usize {
        let mut new = 0;
        for &v in self.index.coverage(u) {
            new += !self.covered.put(v as usize) as usize;
        }
        self.count += new;
        new
    }

    fn all_covered(&self) -> bool {
        self.count == self.index.n()
    }
}

/// Runs lazy greedy for at most `k` picks. `after_select` sees each new
/// seed and may end the run early by returning `true`.
fn lazy_greedy<M: Marginals>(
    n: usize,
    k: usize,
    marginals: &mut M,
    deadline: &Deadline,
    mut after_select: impl FnMut(usize) -> bool,
) -> Result<(Vec<usize>, Vec<usize>), SolveError> {
    let mut heap: BinaryHeap<LazyQueueEntry> = (0..n)
        .map(|u| LazyQueueEntry { vertex: u, gain: marginals.gain(u), round: 0 })
        .collect();
    let mut seeds = Vec::with_capacity(k);
    let mut gains = Vec::with_capacity(k);
    let mut pops = 0usize;
    while seeds.len() < k && !marginals.all_covered() {
        let Some(top) = heap.pop() else { break };
        pops += 1;
        if pops.is_multiple_of(256) {
            deadline.check()?;
        }
        if top.round == seeds.len() {
            if top.gain == 0 {
                break;
            }
            let gain = marginals.select(top.vertex);
            debug_assert_eq!(gain, top.gain);
            seeds.push(top.vertex);
            gains.push(gain);
            if after_select(top.vertex) {
                break;
            }
        } else {
            heap.push(LazyQueueEntry {
                vertex: top.vertex,
                gain: marginals.gain(top.vertex),
                round: seeds.len(),
            });
        }
    }
    Ok((seeds, gains))
}

/// Lazy-forward greedy on exact d-hop marginals. Produces the same seeds and
/// gains as [`super::naive_greedy`].
///
/// For `d > 1` all d-coverages are materialized first, which takes
/// `sum |N_d(u)|` entries of memory and is refused above `limits.memory_cap`.
pub fn celf(g: &Graph, k: usize, d: usize, limits: &Limits) -> Result<SeedSet, SolveError> {
    celf_with_index(g, k, d, limits).map(|(s, _)| s)
}

/// Like [`celf`], also returning the size of the coverage index it built
/// (0 for `d == 1`).
pub fn celf_with_index(
    g: &Graph,
    k: usize,
    d: usize,
    limits: &Limits,
) -> Result<(SeedSet, usize), SolveError> {
    check_budget(g, k, d)?;
    let deadline = limits.start();
    if d == 1 {
        let mut m = ClosedNeighbourhood::new(g);
        let (seeds, gains) = lazy_greedy(g.n(), k, &mut m, &deadline, |_| false)?;
        return Ok((SeedSet { seeds, gains }, 0));
    }
    let index = CoverageIndex::build_with(g, d, limits)?;
    let mut m = IndexedCoverage {
        index: &index,
        covered: FixedBitSet::with_capacity(g.n()),
        count: 0,
    };
    let (seeds, gains) = lazy_greedy(g.n(), k, &mut m, &deadline, |_| false)?;
    Ok((SeedSet { seeds, gains }, index.memory_entries()))
}

/// Lazy greedy that ranks candidates by 1-hop marginal gain whatever `d` is.
/// Gains in the result are measured at the true `d`; selection also stops
/// once the d-hop coverage is complete.
pub fn greedy_one(g: &Graph, k: usize, d: usize, limits: &Limits) -> Result<SeedSet, SolveError> {
    check_budget(g, k, d)?;
    let deadline = limits.start();
    let mut m = ClosedNeighbourhood::new(g);
    let mut covered_d = FixedBitSet::with_capacity(g.n());
    let mut count_d = 0;
    let mut bfs = Bfs::new(g.n());
    let mut d_gains = Vec::with_capacity(k);
    let (seeds, _) = lazy_greedy(g.n(), k, &mut m, &deadline, |s| {
        let new = bfs
            .run(g, &[s], d)
            .iter()
            .filter(|&&v| !covered_d.put(v as usize))
            .count();
        count_d += new;
        d_gains.push(new);
        count_d == g.n()
    })?;
    Ok(SeedSet { seeds, gains: d_gains })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::naive_greedy;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    #[test]
    fn path_of_five() {
        let s = celf(&path(5), 2, 1, &Limits::none()).unwrap();
        assert_eq!(s.seeds, vec![1, 3]);
        assert_eq!(s.gains, vec![3, 2]);
    }

    #[test]
    fn queue_order_prefers_gain_then_small_id() {
        let a = LazyQueueEntry { vertex: 3, gain: 5, round: 0 };
        let b = LazyQueueEntry { vertex: 1, gain: 5, round: 0 };
        let c = LazyQueueEntry { vertex: 0, gain: 4, round: 0 };
        let mut heap: BinaryHeap<_> = [a, b, c].into_iter().collect();
        assert_eq!(heap.pop().unwrap().vertex, 1);
        assert_eq!(heap.pop().unwrap().vertex, 3);
    }

    #[test]
    fn stops_early_when_everything_is_covered() {
        let g = path(5);
        let s = celf(&g, 5, 4, &Limits::none()).unwrap();
        assert_eq!(s.seeds, vec![0]);
        assert_eq!(s.gains, vec![5]);
        assert_eq!(naive_greedy(&g, 5, 4, &Limits::none()).unwrap(), s);
    }

    #[test]
    fn greedy_one_equals_celf_at_one_hop() {
        let g = crate::gen::erdos_renyi(&crate::gen::GenSpec::directed(200, 0.02, 9)).unwrap();
        for k in [1, 5, 40] {
            assert_eq!(
                greedy_one(&g, k, 1, &Limits::none()).unwrap(),
                celf(&g, k, 1, &Limits::none()).unwrap()
            );
        }
    }

    #[test]
    fn greedy_one_misses_the_two_hop_hub() {
        // Hub 0 points at 3 relays, each relay at 10 private leaves: 34
        // vertices within 2 hops. Vertex 1 has out-degree 5 but nothing
        // behind its leaves.
        let mut arcs = Vec::new();
        let mut next = 2;
        let mut relays = Vec::new();
        for _ in 0..3 {
            relays.push(next);
            arcs.push((0, next));
            next += 1;
        }
        for &r in &relays {
            for _ in 0..10 {
                arcs.push((r, next));
                next += 1;
            }
        }
        for _ in 0..5 {
            arcs.push((1, next));
            next += 1;
        }
        let g = Graph::from_arcs(next, arcs).unwrap();
        let gr1 = greedy_one(&g, 1, 2, &Limits::none()).unwrap();
        let best = celf(&g, 1, 2, &Limits::none()).unwrap();
        // Relays tie with 11 closed 1-hop neighbours, the smallest wins.
        assert_eq!(gr1.seeds, vec![relays[0]]);
        assert_eq!(best.seeds, vec![0]);
        assert_eq!(gr1.gains, vec![crate::graph::d_coverage(&g, relays[0], 2).len()]);
        assert_eq!(best.gains, vec![34]);
        assert!(gr1.covered() < best.covered());
    }

    #[test]
    fn memory_cap_is_reported() {
        let g = path(2000);
        let err = celf(&g, 3, 3, &Limits::none().with_memory_cap(10)).unwrap_err();
        assert!(matches!(err, SolveError::MemoryCap { .. }));
    }

    #[test]
    fn zero_time_limit_times_out_on_large_input() {
        let g = crate::gen::erdos_renyi(&crate::gen::GenSpec::directed(3000, 0.003, 1)).unwrap();
        let limits = Limits::none().with_time_limit(std::time::Duration::ZERO);
        assert!(matches!(celf(&g, 50, 3, &limits), Err(SolveError::Timeout(_))));
    }
}
