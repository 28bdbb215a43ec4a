use crate::graph::Graph;

/// Arc list prepared for message passing.
///
/// Arcs are stored grouped by destination (sources ascending inside each
/// group); a second index groups the same arc ids by source. Unlike
/// [`Graph`], self-loops are allowed here.
#[derive(Debug, Clone)]
pub struct MessageGraph {
    n: usize,
    dst_offsets: Vec<usize>,
    src: Vec<u32>,
    dst: Vec<u32>,
    src_offsets: Vec<usize>,
    src_edges: Vec<u32>,
}

impl MessageGraph {
    /// Message passing along the arcs of `g`, optionally adding a self-loop
    /// on every vertex.
    pub fn new(g: &Graph, self_loops: bool) -> Self {
        let n = g.n();
        let m = g.m() + if self_loops { n } else { 0 };
        let mut dst_offsets = Vec::with_capacity(n + 1);
        let mut src = Vec::with_capacity(m);
        let mut dst = Vec::with_capacity(m);
        dst_offsets.push(0);
        for u in 0..n {
            let preds = g.predecessor_slice(u);
            let mut inserted = !self_loops;
            for &w in preds {
                if !inserted && w as usize > u {
                    src.push(u as u32);
                    inserted = true;
                }
                src.push(w);
            }
            if !inserted {
                src.push(u as u32);
            }
            dst.resize(src.len(), u as u32);
            dst_offsets.push(src.len());
        }

        let mut src_offsets = vec![0usize; n + 1];
        for &w in &src {
            src_offsets[w as usize + 1] += 1;
        }
        for i in 0..n {
            src_offsets[i + 1] += src_offsets[i];
        }
        let mut fill = src_offsets.clone();
        let mut src_edges = vec![0u32; src.len()];
        for (e, &w) in src.iter().enumerate() {
            src_edges[fill[w as usize]] = e as u32;
            fill[w as usize] += 1;
        }
        MessageGraph { n, dst_offsets, src, dst, src_offsets, src_edges }
    }

    /// The input the scorer sees: the reversed graph with self-loops, so
    /// messages flow from covered vertices back to their coverers and every
    /// vertex also hears itself.
    pub fn for_scoring(g: &Graph) -> Self {
        Self::new(&g.reverse(), true)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.src.len()
    }

    #[inline]
    pub fn src(&self, e: usize) -> usize {
        self.src[e] as usize
    }

    #[inline]
    pub fn dst(&self, e: usize) -> usize {
        self.dst[e] as usize
    }

    /// Arc ids ending at `u`.
    #[inline]
    pub fn incoming(&self, u: usize) -> std::ops::Range<usize> {
        self.dst_offsets[u]..self.dst_offsets[u + 1]
    }

    /// Arc ids leaving `w`.
    #[inline]
    pub fn outgoing(&self, w: usize) -> impl ExactSizeIterator<Item = usize> + Clone + '_ {
        self.src_edges[self.src_offsets[w]..self.src_offsets[w + 1]]
            .iter()
            .map(|&e| e as usize)
    }

    pub fn in_degree(&self, u: usize) -> usize {
        self.dst_offsets[u + 1] - self.dst_offsets[u]
    }

    pub fn out_degree(&self, w: usize) -> usize {
        self.src_offsets[w + 1] - self.src_offsets[w]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scoring_view_is_reversed_with_loops() {
        // 0 -> 1, 0 -> 2, 2 -> 1
        let g = Graph::from_arcs(3, [(0, 1), (0, 2), (2, 1)]).unwrap();
        let mg = MessageGraph::for_scoring(&g);
        assert_eq!(mg.num_edges(), 6);
        let into = |u: usize| mg.incoming(u).map(|e| mg.src(e)).collect::<Vec<_>>();
        // In the reversed graph 0 hears from its G-successors 1 and 2.
        assert_eq!(into(0), vec![0, 1, 2]);
        assert_eq!(into(1), vec![1]);
        assert_eq!(into(2), vec![1, 2]);
        let out_of = |w: usize| {
            let mut v: Vec<usize> = mg.outgoing(w).map(|e| mg.dst(e)).collect();
            v.sort();
            v
        };
        assert_eq!(out_of(1), vec![0, 1, 2]);
        for e in 0..mg.num_edges() {
            assert!(mg.incoming(mg.dst(e)).contains(&e));
            assert!(mg.outgoing(mg.src(e)).any(|x| x == e));
        }
    }

    #[test]
    fn plain_view_has_no_loops() {
        let g = Graph::from_arcs(3, [(0, 1)]).unwrap();
        let mg = MessageGraph::new(&g, false);
        assert_eq!(mg.num_edges(), 1);
        assert_eq!(mg.in_degree(2), 0);
        assert_eq!(mg.out_degree(0), 1);
    }
}
