//! Plain-text edge lists in the SNAP style: one `<u> <v>` pair per line,
//! `#` and `%` lines are comments. External ids may be sparse or huge; they
//! are relabeled to `0..n` in ascending order, so the dense labeling does not
//! depend on line order. A line holding a single id declares a vertex
//! without arcs.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{Graph, GraphError};

/// Dense-to-original vertex id mapping. Original ids are kept sorted, so
/// dense id `i` is the `i`-th smallest original id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdMap {
    original: Vec<i64>,
}

impl IdMap {
    /// The identity mapping on `0..n`.
    pub fn identity(n: usize) -> Self {
        IdMap { original: (0..n as i64).collect() }
    }

    fn from_ids(mut ids: Vec<i64>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        IdMap { original: ids }
    }

    pub fn len(&self) -> usize {
        self.original.len()
    }

    pub fn is_empty(&self) -> bool {
        self.original.is_empty()
    }

    pub fn original(&self, dense: usize) -> i64 {
        self.original[dense]
    }

    pub fn dense(&self, original: i64) -> Option<usize> {
        self.original.binary_search(&original).ok()
    }
}

/// A graph loaded from text together with its id mapping.
#[derive(Debug, Clone)]
pub struct EdgeList {
    pub graph: Graph,
    pub ids: IdMap,
    pub directed: bool,
}

fn parse_token(tok: Option<&str>, line: usize) -> Result<i64, GraphError> {
    let tok = tok.ok_or_else(|| GraphError::Parse {
        line,
        msg: "expected two vertex ids".into(),
    })?;
    tok.parse().map_err(|_| GraphError::Parse {
        line,
        msg: format!("invalid vertex id {tok:?}"),
    })
}

/// Parses an edge list. Tokens after the first two on a line (weights,
/// timestamps, signs) are ignored. With `directed == false` each edge is
/// stored as a pair of opposite arcs.
pub fn from_edge_list<R: BufRead>(reader: R, directed: bool) -> Result<EdgeList, GraphError> {
    let mut seen = Vec::new();
    let mut pairs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        let a = parse_token(toks.next(), i + 1)?;
        seen.push(a);
        if let Some(tok) = toks.next() {
            let b = parse_token(Some(tok), i + 1)?;
            seen.push(b);
            pairs.push((a, b));
        }
    }
    if seen.is_empty() {
        return Err(GraphError::Empty);
    }
    let ids = IdMap::from_ids(seen);
    let dense = |x: i64| ids.dense(x).expect("every id was recorded");
    let arcs = pairs.into_iter().map(|(a, b)| (dense(a), dense(b)));
    let graph = if directed {
        Graph::from_arcs(ids.len(), arcs)?
    } else {
        Graph::from_edges(ids.len(), arcs)?
    };
    Ok(EdgeList { graph, ids, directed })
}

pub fn read_edge_list(path: &Path, directed: bool) -> Result<EdgeList, GraphError> {
    from_edge_list(BufReader::new(File::open(path)?), directed)
}

/// Writes dense ids, one arc per line. Undirected graphs emit each edge once
/// as `u v` with `u < v`. Vertices without arcs follow as single-id lines, so
/// reading the file back gives the same graph.
pub fn write_edge_list<W: Write>(g: &Graph, directed: bool, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# n={} arcs={} directed={}", g.n(), g.m(), directed)?;
    for (u, v) in g.arcs() {
        if directed || u < v {
            writeln!(out, "{u} {v}")?;
        }
    }
    for u in (0..g.n()).filter(|&u| g.out_degree(u) == 0 && g.in_degree(u) == 0) {
        writeln!(out, "{u}")?;
    }
    out.flush()
}

/// Writes seeds as original ids, one per line.
pub fn write_seeds<W: Write>(seeds: &[usize], ids: &IdMap, mut out: W) -> std::io::Result<()> {
    for &s in seeds {
        writeln!(out, "{}", ids.original(s))?;
    }
    out.flush()
}
