//! Seed-selection algorithms.
//!
//! Every greedy variant breaks ties toward the smallest vertex id and stops
//! early once the whole graph is covered, so the returned seed list may be
//! shorter than `k`.

mod brute;
mod fastcover;
mod greedy;
mod index;
mod lazy;
mod topk;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use brute::{brute_force, BruteForceBudget};
pub use fastcover::{fastcover, fastcover_seeds};
pub use greedy::naive_greedy;
pub use index::CoverageIndex;
pub use lazy::{celf, celf_with_index, greedy_one, LazyQueueEntry};
pub use topk::top_k_by_score;

use crate::graph::{Graph, SeedSet};
use crate::neural::Model;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("budget k = {k} outside 1..={n}")]
    InvalidBudget { k: usize, n: usize },
    #[error("hop bound must be at least 1")]
    InvalidHops,
    #[error("coverage index needs more than {cap} entries (reached {reached} after {vertices} vertices)")]
    MemoryCap { cap: usize, reached: usize, vertices: usize },
    #[error("time limit of {0:?} exceeded")]
    Timeout(Duration),
    #[error("{combinations} combinations exceed the brute-force budget of {max}")]
    TooManyCombinations { combinations: u128, max: u128 },
    #[error("fastcover needs a trained model")]
    MissingModel,
}

impl SolveError {
    /// Resource exhaustion (time or memory) rather than bad input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, SolveError::MemoryCap { .. } | SolveError::Timeout(_))
    }
}

/// Resource limits applied cooperatively by the solvers.
#[derive(Debug, Clone, Copy, Default)]
pub struct Limits {
    pub time_limit: Option<Duration>,
    /// Cap on the number of entries a [`CoverageIndex`] may hold.
    pub memory_cap: Option<usize>,
}

impl Limits {
    pub fn none() -> Self {
        Limits::default()
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn with_memory_cap(mut self, entries: usize) -> Self {
        self.memory_cap = Some(entries);
        self
    }

    pub(crate) fn start(&self) -> Deadline {
        Deadline {
            at: self.time_limit.map(|t| (Instant::now() + t, t)),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Deadline {
    at: Option<(Instant, Duration)>,
}

impl Deadline {
    pub(crate) fn check(&self) -> Result<(), SolveError> {
        match self.at {
            Some((at, limit)) if Instant::now() > at => Err(SolveError::Timeout(limit)),
            _ => Ok(()),
        }
    }
}

pub(crate) fn check_budget(g: &Graph, k: usize, d: usize) -> Result<(), SolveError> {
    if k == 0 || k > g.n() {
        return Err(SolveError::InvalidBudget { k, n: g.n() });
    }
    if d == 0 {
        return Err(SolveError::InvalidHops);
    }
    Ok(())
}

/// Solver identifiers as used on the command line and in result files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Greedy,
    Celf,
    Greedy1,
    Brute,
    FastCover,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Greedy,
        Algorithm::Celf,
        Algorithm::Greedy1,
        Algorithm::Brute,
        Algorithm::FastCover,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Celf => "celf",
            Algorithm::Greedy1 => "greedy1",
            Algorithm::Brute => "brute",
            Algorithm::FastCover => "fastcover",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm {s:?}"))
    }
}

/// Everything besides `(g, k, d)` that some solver may need.
#[derive(Debug, Clone, Default)]
pub struct SolveOptions<'a> {
    pub limits: Limits,
    pub brute: BruteForceBudget,
    /// Required by [`Algorithm::FastCover`].
    pub model: Option<&'a Model>,
}

/// Result of [`solve`]: the seeds and the size of the coverage index the
/// solver materialized (0 if it built none).
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub seeds: SeedSet,
    pub index_entries: usize,
}

/// Runs `algo` on `(g, k, d)`.
pub fn solve(
    algo: Algorithm,
    g: &Graph,
    k: usize,
    d: usize,
    options: &SolveOptions<'_>,
) -> Result<SolveReport, SolveError> {
    let plain = |seeds| SolveReport { seeds, index_entries: 0 };
    match algo {
        Algorithm::Greedy => naive_greedy(g, k, d, &options.limits).map(plain),
        Algorithm::Celf => celf_with_index(g, k, d, &options.limits)
            .map(|(seeds, index_entries)| SolveReport { seeds, index_entries }),
        Algorithm::Greedy1 => greedy_one(g, k, d, &options.limits).map(plain),
        Algorithm::Brute => {
            check_budget(g, k, d)?;
            brute_force(g, k, d, &options.brute).map(plain)
        }
        Algorithm::FastCover => {
            let model = options.model.ok_or(SolveError::MissingModel)?;
            fastcover(model, g, k, d).map(plain)
        }
    }
}
