use std::path::Path;

use rayon::prelude::*;

use super::{Limits, SolveError};
use crate::graph::{Bfs, Graph};

/// Materialized d-coverage lists for every vertex, stored contiguously.
///
/// Built on the original graph it answers "who does `u` cover"; built on the
/// reversed graph it answers "who covers `u`", which is what the coverage
/// loss needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageIndex {
    d: usize,
    offsets: Vec<usize>,
    entries: Vec<u32>,
}

/// Vertices handled between two limit checks.
const BLOCK: usize = 1024;

impl CoverageIndex {
    pub fn build(g: &Graph, d: usize) -> Self {
        Self::build_with(g, d, &Limits::none()).expect("no limits configured")
    }

    /// Builds the index, aborting once the entry count exceeds
    /// `limits.memory_cap` or the time limit runs out.
    pub fn build_with(g: &Graph, d: usize, limits: &Limits) -> Result<Self, SolveError> {
        let deadline = limits.start();
        let n = g.n();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut entries = Vec::new();
        for block in (0..n).step_by(BLOCK) {
            let end = (block + BLOCK).min(n);
            let lists: Vec<Vec<u32>> = (block..end)
                .into_par_iter()
                .map_init(
                    || Bfs::new(n),
                    |bfs, u| bfs.run(g, &[u], d).to_vec(),
                )
                .collect();
            for list in lists {
                entries.extend_from_slice(&list);
                offsets.push(entries.len());
            }
            if let Some(cap) = limits.memory_cap {
                if entries.len() > cap {
                    return Err(SolveError::MemoryCap {
                        cap,
                        reached: entries.len(),
                        vertices: end,
                    });
                }
            }
            deadline.check()?;
        }
        Ok(CoverageIndex { d, offsets, entries })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// The d-coverage of `u` in BFS order (starting with `u`).
    pub fn coverage(&self, u: usize) -> &[u32] {
        &self.entries[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Total number of stored entries, i.e. the sum of all coverage sizes.
    pub fn memory_entries(&self) -> usize {
        self.entries.len()
    }

    /// Serializes to a little-endian byte blob (`d`, `n`, offsets, entries).
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(24 + 8 * self.offsets.len() + 4 * self.entries.len());
        out.extend_from_slice(&(self.d as u64).to_le_bytes());
        out.extend_from_slice(&(self.n() as u64).to_le_bytes());
        out.extend_from_slice(&(self.entries.len() as u64).to_le_bytes());
        for &o in &self.offsets {
            out.extend_from_slice(&(o as u64).to_le_bytes());
        }
        for &e in &self.entries {
            out.extend_from_slice(&e.to_le_bytes());
        }
        out
    }

    /// Inverse of [`CoverageIndex::to_bytes`]; `None` on any inconsistency.
    pub fn from_bytes(bytes: &[u8]) -> Option<Self> {
        let word = |i: usize| -> Option<u64> {
            Some(u64::from_le_bytes(bytes.get(8 * i..8 * i + 8)?.try_into().ok()?))
        };
        let d = word(0)? as usize;
        let n = word(1)? as usize;
        let m = word(2)? as usize;
        let header = 3 + n + 1;
        if bytes.len() != 8 * header + 4 * m {
            return None;
        }
        let offsets: Vec<usize> = (3..header).map(|i| word(i).map(|w| w as usize)).collect::<Option<_>>()?;
        let entries: Vec<u32> = bytes[8 * header..]
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let consistent = offsets.first() == Some(&0)
            && offsets.last() == Some(&m)
            && offsets.windows(2).all(|w| w[0] <= w[1])
            && entries.iter().all(|&e| (e as usize) < n);
        consistent.then_some(CoverageIndex { d, offsets, entries })
    }

    /// Loads the index for `(g, d)` from `dir` if a valid copy is there,
    /// otherwise builds it and stores it. Files are named
    /// `{content_hash}-d{d}.cov`; unreadable or stale files are rebuilt.
    pub fn cached(g: &Graph, d: usize, dir: Option<&Path>, limits: &Limits) -> Result<Self, SolveError> {
        let Some(dir) = dir else {
            return Self::build_with(g, d, limits);
        };
        let path = dir.join(format!("{}-d{d}.cov", g.content_hash()));
        if let Ok(bytes) = std::fs::read(&path) {
            if let Some(idx) = Self::from_bytes(&bytes).filter(|i| i.d == d && i.n() == g.n()) {
                return Ok(idx);
            }
        }
        let idx = Self::build_with(g, d, limits)?;
        // A cache that cannot be written is not an error; the next run rebuilds.
        if std::fs::create_dir_all(dir).is_ok() {
            let tmp = path.with_extension(format!("tmp{}", std::process::id()));
            if std::fs::write(&tmp, idx.to_bytes()).is_ok() {
                let _ = std::fs::rename(&tmp, &path);
            }
        }
        Ok(idx)
    }
}
