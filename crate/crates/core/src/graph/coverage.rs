use fixedbitset::FixedBitSet;

use super::Graph;

/// A set of vertices kept both as a membership bitmask and a sorted id list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    mask: FixedBitSet,
    ids: Vec<usize>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet { mask: FixedBitSet::with_capacity(n), ids: Vec::new() }
    }

    /// Builds a set over `0..n`; duplicates in `ids` are ignored.
    pub fn from_ids<I: IntoIterator<Item = usize>>(n: usize, ids: I) -> Self {
        let mut mask = FixedBitSet::with_capacity(n);
        for id in ids {
            mask.insert(id);
        }
        let ids = mask.ones().collect();
        VertexSet { mask, ids }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.mask.contains(v)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.ids
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.ids.iter().copied()
    }

    pub fn mask(&self) -> &FixedBitSet {
        &self.mask
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        self.mask.intersection_count(&other.mask)
    }

    pub fn union_len(&self, other: &VertexSet) -> usize {
        self.mask.union_count(&other.mask)
    }
}

/// Reusable scratch space for depth-bounded multi-source BFS.
///
/// The visited mask is cleared through the list of reached vertices, so a
/// run costs time proportional to what it touches, not to `n`.
#[derive(Debug, Clone)]
pub struct Bfs {
    visited: FixedBitSet,
    reached: Vec<u32>,
}

impl Bfs {
    pub fn new(n: usize) -> Self {
        Bfs { visited: FixedBitSet::with_capacity(n), reached: Vec::new() }
    }

    /// Returns every vertex within `d` hops of some source, in BFS order.
    /// The slice is valid until the next call.
    pub fn run(&mut self, g: &Graph, sources: &[usize], d: usize) -> &[u32] {
        for &v in &self.reached {
            self.visited.set(v as usize, false);
        }
        self.reached.clear();
        for &s in sources {
            if !self.visited.put(s) {
                self.reached.push(s as u32);
            }
        }
        let mut level_start = 0;
        for _ in 0..d {
            let level_end = self.reached.len();
            if level_start == level_end {
                break;
            }
            for i in level_start..level_end {
                let u = self.reached[i] as usize;
                for &v in g.successor_slice(u) {
                    if !self.visited.put(v as usize) {
                        self.reached.push(v);
                    }
                }
            }
            level_start = level_end;
        }
        &self.reached
    }
}

/// The d-coverage of `source`: every vertex reachable in at most `d` arcs,
/// including `source` itself.
pub fn d_coverage(g: &Graph, source: usize, d: usize) -> VertexSet {
    d_coverage_of_set(g, &[source], d)
}

/// Union of the d-coverages of every vertex in `seeds`.
pub fn d_coverage_of_set(g: &Graph, seeds: &[usize], d: usize) -> VertexSet {
    let mut bfs = Bfs::new(g.n());
    let reached = bfs.run(g, seeds, d);
    VertexSet::from_ids(g.n(), reached.iter().map(|&v| v as usize))
}

/// Fraction of the vertex set that lies within `d` hops of `seeds`.
pub fn coverage_rate(g: &Graph, seeds: &[usize], d: usize) -> f64 {
    let mut bfs = Bfs::new(g.n());
    bfs.run(g, seeds, d).len() as f64 / g.n() as f64
}

/// Jaccard similarity of the d-coverages of `u` and `v`.
pub fn jaccard_d(g: &Graph, u: usize, v: usize, d: usize) -> f64 {
    let a = d_coverage(g, u, d);
    let b = d_coverage(g, v, d);
    // Both sets contain their centre, so the union is never empty.
    a.intersection_len(&b) as f64 / a.union_len(&b) as f64
}

/// Selected seeds in pick order together with the number of newly covered
/// vertices each one contributed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SeedSet {
    pub seeds: Vec<usize>,
    pub gains: Vec<usize>,
}

impl SeedSet {
    /// Records `seeds` in the given order, computing marginal gains at hop
    /// bound `d`.
    pub fn with_gains(g: &Graph, seeds: Vec<usize>, d: usize) -> Self {
        let mut covered = FixedBitSet::with_capacity(g.n());
        let mut bfs = Bfs::new(g.n());
        let gains = seeds
            .iter()
            .map(|&s| {
                bfs.run(g, &[s], d)
                    .iter()
                    .filter(|&&v| !covered.put(v as usize))
                    .count()
            })
            .collect();
        SeedSet { seeds, gains }
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    /// Total number of covered vertices.
    pub fn covered(&self) -> usize {
        self.gains.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    #[test]
    fn zero_hops_is_the_source() {
        let g = path(5);
        assert_eq!(d_coverage(&g, 2, 0).as_slice(), &[2]);
    }

    #[test]
    fn one_hop_is_closed_out_neighbourhood() {
        let g = Graph::from_arcs(5, [(0, 1), (0, 2), (3, 0), (2, 4)]).unwrap();
        for u in 0..5 {
            let mut expected: Vec<usize> = g.successors(u).chain([u]).collect();
            expected.sort();
            assert_eq!(d_coverage(&g, u, 1).as_slice(), expected.as_slice());
        }
    }

    #[test]
    fn empty_seed_set_covers_nothing() {
        let g = path(4);
        assert!(d_coverage_of_set(&g, &[], 3).is_empty());
        assert_eq!(coverage_rate(&g, &[], 3), 0.0);
    }

    #[test]
    fn full_cover_rate_is_one() {
        let g = path(5);
        assert_eq!(coverage_rate(&g, &[2], 2), 1.0);
    }

    #[test]
    fn jaccard_identity_and_disjoint() {
        let g = Graph::from_arcs(3, [(0, 1)]).unwrap();
        assert_eq!(jaccard_d(&g, 0, 0, 2), 1.0);
        let iso = Graph::from_arcs(2, []).unwrap();
        assert_eq!(jaccard_d(&iso, 0, 1, 1), 0.0);
    }

    #[test]
    fn jaccard_two_stars_sharing_leaves() {
        // Hubs 0 and 1 both point at leaves 2..=6; hub 1 also reaches 7.
        let mut arcs: Vec<(usize, usize)> = (2..=6).flat_map(|l| [(0, l), (1, l)]).collect();
        arcs.push((1, 7));
        let g = Graph::from_arcs(8, arcs).unwrap();
        let a: std::collections::BTreeSet<usize> = [0, 2, 3, 4, 5, 6].into();
        let b: std::collections::BTreeSet<usize> = [1, 2, 3, 4, 5, 6, 7].into();
        let expected =
            a.intersection(&b).count() as f64 / a.union(&b).count() as f64;
        assert_eq!(jaccard_d(&g, 0, 1, 1), expected);
        assert!((expected - 5.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn seed_gains_are_marginal() {
        let g = path(5);
        let s = SeedSet::with_gains(&g, vec![1, 3, 2], 1);
        assert_eq!(s.gains, vec![3, 2, 0]);
        assert_eq!(s.covered(), 5);
    }

    #[test]
    fn bfs_scratch_is_reusable() {
        let g = path(6);
        let mut bfs = Bfs::new(6);
        assert_eq!(bfs.run(&g, &[0], 5).len(), 6);
        assert_eq!(bfs.run(&g, &[5], 1).len(), 2);
        assert_eq!(bfs.run(&g, &[2, 3], 0).len(), 2);
    }
}
