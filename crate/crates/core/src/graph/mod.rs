//! Immutable directed graphs in compressed adjacency form.
//!
//! Both directions are stored: `out` lists successors and `in` lists
//! predecessors, so reversal is a pointer swap and multi-hop coverage can be
//! evaluated from either side without rebuilding anything.

mod coverage;
mod edge_list;

pub use coverage::{
    coverage_rate, d_coverage, d_coverage_of_set, jaccard_d, Bfs, SeedSet, VertexSet,
};
pub use edge_list::{from_edge_list, read_edge_list, write_edge_list, write_seeds, EdgeList, IdMap};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("graph has no vertices")]
    Empty,
    #[error("vertex {id} out of range for graph with {n} vertices")]
    VertexOutOfRange { id: usize, n: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Compressed sparse row adjacency: `targets[offsets[u]..offsets[u + 1]]`
/// are the neighbours of `u`, sorted ascending and free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Csr {
    /// `arcs` must already be sorted by `(src, dst)` and deduplicated.
    fn from_sorted(n: usize, arcs: &[(u32, u32)]) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in arcs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = arcs.iter().map(|&(_, v)| v).collect();
        Csr { offsets, targets }
    }

    #[inline]
    fn row(&self, u: usize) -> &[u32] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }
}

/// A directed graph on vertices `0..n`.
///
/// Self-loops are never stored: every vertex already covers itself at hop 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    out_adj: Csr,
    in_adj: Csr,
    reversed: bool,
}

impl Graph {
    /// Builds a graph from an arbitrary arc stream. Self-loops and duplicate
    /// arcs are dropped.
    pub fn from_arcs<I>(n: usize, arcs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        if n > u32::MAX as usize {
            return Err(GraphError::VertexOutOfRange { id: n, n: u32::MAX as usize });
        }
        let mut fwd = Vec::new();
        for (u, v) in arcs {
            for id in [u, v] {
                if id >= n {
                    return Err(GraphError::VertexOutOfRange { id, n });
                }
            }
            if u != v {
                fwd.push((u as u32, v as u32));
            }
        }
        fwd.sort_unstable();
        fwd.dedup();
        let mut bwd: Vec<(u32, u32)> = fwd.iter().map(|&(u, v)| (v, u)).collect();
        bwd.sort_unstable();
        Ok(Graph {
            n,
            out_adj: Csr::from_sorted(n, &fwd),
            in_adj: Csr::from_sorted(n, &bwd),
            reversed: false,
        })
    }

    /// Builds an undirected graph: every edge becomes a pair of opposite arcs.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_arcs(n, edges.into_iter().flat_map(|(u, v)| [(u, v), (v, u)]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored arcs.
    pub fn m(&self) -> usize {
        self.out_adj.targets.len()
    }

    pub fn successors(&self, u: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.out_adj.row(u).iter().map(|&v| v as usize)
    }

    pub fn predecessors(&self, u: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.in_adj.row(u).iter().map(|&v| v as usize)
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.out_adj.offsets[u + 1] - self.out_adj.offsets[u]
    }

    pub fn in_degree(&self, u: usize) -> usize {
        self.in_adj.offsets[u + 1] - self.in_adj.offsets[u]
    }

    pub(crate) fn successor_slice(&self, u: usize) -> &[u32] {
        self.out_adj.row(u)
    }

    pub(crate) fn predecessor_slice(&self, u: usize) -> &[u32] {
        self.in_adj.row(u)
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out_adj.row(u).binary_search(&(v as u32)).is_ok()
    }

    /// All arcs in `(src, dst)` lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.successors(u).map(move |v| (u, v)))
    }

    /// True when this value was produced by an odd number of reversals.
    pub fn is_reversed_view(&self) -> bool {
        self.reversed
    }

    /// The graph with every arc flipped.
    pub fn reverse(&self) -> Graph {
        Graph {
            n: self.n,
            out_adj: self.in_adj.clone(),
            in_adj: self.out_adj.clone(),
            reversed: !self.reversed,
        }
    }

    /// Same as [`Graph::reverse`] without copying the adjacency arrays.
    pub fn into_reversed(self) -> Graph {
        Graph {
            n: self.n,
            out_adj: self.in_adj,
            in_adj: self.out_adj,
            reversed: !self.reversed,
        }
    }

    /// The graph with its vertices renamed by `perm`: vertex `u` becomes `perm[u]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph, GraphError> {
        assert_eq!(perm.len(), self.n, "permutation length must equal n");
        Graph::from_arcs(self.n, self.arcs().map(|(u, v)| (perm[u], perm[v])))
    }

    /// SHA-256 over the vertex count and the canonical arc list, hex encoded.
    /// Orientation matters: a graph and its reversal hash differently.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        hasher.update((self.n as u64).to_le_bytes());
        for (u, v) in self.arcs() {
            hasher.update((u as u32).to_le_bytes());
            hasher.update((v as u32).to_le_bytes());
        }
        hex::encode(hasher.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency_is_sorted_and_mirrored() {
        let g = Graph::from_arcs(4, [(0, 3), (0, 1), (2, 1), (0, 1), (3, 3)]).unwrap();
        assert_eq!(g.m(), 3);
        assert_eq!(g.successors(0).collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(g.predecessors(1).collect::<Vec<_>>(), vec![0, 2]);
        for (u, v) in g.arcs() {
            assert!(g.predecessors(v).any(|w| w == u));
        }
    }

    #[test]
    fn reverse_flips_arcs() {
        let g = Graph::from_arcs(2, [(0, 1)]).unwrap();
        let r = g.reverse();
        assert!(r.has_arc(1, 0));
        assert!(!r.has_arc(0, 1));
        assert!(r.is_reversed_view());
        assert_eq!(r.reverse(), g);
    }

    #[test]
    fn undirected_graph_is_fixed_by_reverse() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (3, 0)]).unwrap();
        let r = g.reverse();
        assert_eq!(r.arcs().collect::<Vec<_>>(), g.arcs().collect::<Vec<_>>());
    }

    #[test]
    fn out_of_range_and_empty() {
        assert!(matches!(Graph::from_arcs(0, []), Err(GraphError::Empty)));
        assert!(matches!(
            Graph::from_arcs(2, [(0, 2)]),
            Err(GraphError::VertexOutOfRange { id: 2, n: 2 })
        ));
    }

    #[test]
    fn hash_depends_on_orientation() {
        let g = Graph::from_arcs(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.content_hash(), g.clone().content_hash());
        assert_ne!(g.content_hash(), g.reverse().content_hash());
    }
}
