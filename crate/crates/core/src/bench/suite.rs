use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::gen::{derive_seed, erdos_renyi, GenSpec};
use crate::graph::{read_edge_list, Graph};
use crate::solvers::Algorithm;

/// A benchmark description, read from TOML or JSON:
///
/// ```toml
/// solvers = ["celf", "fastcover"]
/// d = [2]
/// k = [16]
/// time_limit = 60.0
///
/// [[graphs]]
/// gen = { n = 1000, p = 0.01, seed = 7 }
/// count = 10
///
/// [[graphs]]
/// path = "data/web.txt"
/// directed = false
///
/// [[models]]
/// d = 2
/// path = "grat-d2.bin"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    pub graphs: Vec<GraphEntry>,
    pub solvers: Vec<Algorithm>,
    pub d: Vec<usize>,
    pub k: Vec<usize>,
    /// Per-run limit in seconds; `None` disables it.
    #[serde(default = "default_time_limit")]
    pub time_limit: Option<f64>,
    /// Largest coverage index (in entries) a solver may build.
    #[serde(default)]
    pub memory_cap: Option<usize>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    /// Trained models for `fastcover`, one per hop bound.
    #[serde(default)]
    pub models: Vec<ModelEntry>,
}

fn default_time_limit() -> Option<f64> {
    Some(900.0)
}

fn default_repetitions() -> usize {
    3
}

fn default_directed() -> bool {
    true
}

/// Either a file (`path`) or a generator spec (`gen`), optionally repeated
/// `count` times with seeds derived from `gen.seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphEntry {
    #[serde(default)]
    pub id: Option<String>,
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default = "default_directed")]
    pub directed: bool,
    #[serde(default)]
    pub gen: Option<GenSpec>,
    #[serde(default)]
    pub count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelEntry {
    pub d: usize,
    pub path: PathBuf,
}

impl Suite {
    pub fn from_toml_str(text: &str) -> Result<Self, BenchError> {
        toml::from_str(text).map_err(|e| BenchError::Suite(e.to_string()))
    }

    pub fn from_json_str(text: &str) -> Result<Self, BenchError> {
        serde_json::from_str(text).map_err(|e| BenchError::Suite(e.to_string()))
    }

    /// Reads a `.json` file as JSON and anything else as TOML.
    pub fn from_path(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let fail = |msg: String| Err(BenchError::Suite(msg));
        if self.graphs.is_empty() || self.solvers.is_empty() || self.d.is_empty() || self.k.is_empty() {
            return fail("graphs, solvers, d and k must all be non-empty".into());
        }
        if self.d.contains(&0) || self.k.contains(&0) {
            return fail("d and k values must be at least 1".into());
        }
        if self.repetitions == 0 {
            return fail("repetitions must be at least 1".into());
        }
        if let Some(t) = self.time_limit {
            if !(t > 0.0 && t.is_finite()) {
                return fail(format!("time_limit must be positive, got {t}"));
            }
        }
        for (i, g) in self.graphs.iter().enumerate() {
            if g.path.is_some() == g.gen.is_some() {
                return fail(format!("graph entry {i} needs exactly one of `path` or `gen`"));
            }
            if g.path.is_some() && g.count.is_some() {
                return fail(format!("graph entry {i}: `count` only applies to generated graphs"));
            }
            if g.count == Some(0) {
                return fail(format!("graph entry {i}: count must be at least 1"));
            }
        }
        if self.solvers.contains(&Algorithm::FastCover) {
            for d in &self.d {
                if !self.models.iter().any(|m| m.d == *d) {
                    return fail(format!("fastcover needs a model for d = {d}"));
                }
            }
        }
        Ok(())
    }
}

impl GraphEntry {
    /// Materializes the graphs of this entry as `(id, generator seed, graph)`.
    pub fn instances(&self, base_dir: &Path) -> Result<Vec<(String, Option<u64>, Graph)>, BenchError> {
        if let Some(path) = &self.path {
            let full = base_dir.join(path);
            let id = self.id.clone().unwrap_or_else(|| {
                path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
            });
            let el = read_edge_list(&full, self.directed)
                .map_err(|source| BenchError::Graph { id: id.clone(), source })?;
            return Ok(vec![(id, None, el.graph)]);
        }
        let spec = self.gen.expect("validated entry has a generator");
        let seeds: Vec<u64> = match self.count {
            None => vec![spec.seed],
            Some(c) => (0..c as u64).map(|i| derive_seed(spec.seed, i)).collect(),
        };
        seeds
            .into_iter()
            .enumerate()
            .map(|(i, seed)| {
                let g = erdos_renyi(&GenSpec { seed, ..spec })?;
                let id = match (&self.id, self.count) {
                    (Some(id), Some(_)) => format!("{id}-{i}"),
                    (Some(id), None) => id.clone(),
                    (None, _) => format!("er-n{}-p{}-s{seed}", spec.n, spec.p),
                };
                Ok((id, Some(seed), g))
            })
            .collect()
    }
}
