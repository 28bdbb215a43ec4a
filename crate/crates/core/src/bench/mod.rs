//! Benchmark grids: every (graph, d, k, solver) cell of a suite is run and
//! reported as one CSV row. Runs that hit the time limit or the memory cap
//! become `timeout` / `memory_cap` rows with empty measurements instead of
//! aborting the suite.

mod suite;

use std::io::{Read, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use suite::{GraphEntry, ModelEntry, Suite};

use crate::gen::GenError;
use crate::graph::{coverage_rate, Graph, GraphError};
use crate::neural::{load_model, Model, ModelError};
use crate::solvers::{fastcover_seeds, solve, Algorithm, Limits, SolveError, SolveOptions};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("suite file: {0}")]
    Suite(String),
    #[error("graph {id}: {source}")]
    Graph { id: String, source: GraphError },
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("model {path}: {source}")]
    Model { path: String, source: ModelError },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Timeout,
    MemoryCap,
    /// The solver refused the instance (e.g. brute force over budget).
    Error,
}

/// One CSV row. Measurements are empty unless `status` is `ok`; timings are
/// also empty when the suite runs without timing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub solver: String,
    pub graph: String,
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub k: usize,
    pub status: Status,
    pub coverage: Option<f64>,
    /// Median wall time over the repetitions, in seconds.
    pub seconds: Option<f64>,
    /// One-off preparation not counted in `seconds` (model loading).
    pub setup_seconds: Option<f64>,
    /// Entries of the largest coverage index the solver built.
    pub index_entries: Option<usize>,
    /// Generator seed for synthetic graphs.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Record wall times. Without timing, the CSV depends only on the suite
    /// and is byte-for-byte reproducible.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { timing: true }
    }
}

struct LoadedModel {
    d: usize,
    model: Model,
    setup: Duration,
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort();
    xs[xs.len() / 2]
}

fn status_of(err: &SolveError) -> Status {
    match err {
        SolveError::Timeout(_) => Status::Timeout,
        SolveError::MemoryCap { .. } => Status::MemoryCap,
        _ => Status::Error,
    }
}

/// Timed repetitions of one cell. Returns seeds, median time and index size,
/// or the status of the first failed repetition.
fn run_cell(
    algo: Algorithm,
    g: &Graph,
    k: usize,
    d: usize,
    suite: &Suite,
    model: Option<&Model>,
) -> Result<(Vec<usize>, Duration, usize), Status> {
    let limits = Limits {
        time_limit: suite.time_limit.map(Duration::from_secs_f64),
        memory_cap: suite.memory_cap,
    };
    let mut times = Vec::with_capacity(suite.repetitions);
    let mut last = None;
    for _ in 0..suite.repetitions.max(1) {
        let start = Instant::now();
        let outcome = if algo == Algorithm::FastCover {
            // Inference only: one forward pass and top-k. Gains are not needed.
            let model = model.ok_or(Status::Error)?;
            if k == 0 || k > g.n() {
                return Err(Status::Error);
            }
            (fastcover_seeds(model, g, k), 0)
        } else {
            let options = SolveOptions { limits, model, ..Default::default() };
            let report = solve(algo, g, k, d, &options).map_err(|e| status_of(&e))?;
            (report.seeds.seeds, report.index_entries)
        };
        let elapsed = start.elapsed();
        if limits.time_limit.is_some_and(|t| elapsed > t) {
            return Err(Status::Timeout);
        }
        times.push(elapsed);
        last = Some(outcome);
    }
    let (seeds, entries) = last.expect("at least one repetition");
    Ok((seeds, median(times), entries))
}

/// Runs every cell of `suite`. Graph and model files are resolved relative
/// to `base_dir`. Cell failures become rows; only unreadable inputs are
/// errors.
pub fn run_suite(suite: &Suite, base_dir: &Path, options: RunOptions) -> Result<Vec<BenchRecord>, BenchError> {
    suite.validate()?;
    let mut models = Vec::new();
    if suite.solvers.contains(&Algorithm::FastCover) {
        for entry in &suite.models {
            let path = base_dir.join(&entry.path);
            let start = Instant::now();
            let model = load_model(&path)
                .map_err(|source| BenchError::Model { path: path.display().to_string(), source })?;
            models.push(LoadedModel { d: entry.d, model, setup: start.elapsed() });
        }
    }
    let secs = |t: Duration| options.timing.then_some(t.as_secs_f64());

    let mut records = Vec::new();
    for entry in &suite.graphs {
        for (id, seed, g) in entry.instances(base_dir)? {
            for &d in &suite.d {
                for &k in &suite.k {
                    for &algo in &suite.solvers {
                        let loaded = models.iter().find(|m| m.d == d);
                        let model = loaded.map(|m| &m.model);
                        let mut record = BenchRecord {
                            solver: algo.to_string(),
                            graph: id.clone(),
                            n: g.n(),
                            m: g.m(),
                            d,
                            k,
                            status: Status::Ok,
                            coverage: None,
                            seconds: None,
                            setup_seconds: None,
                            index_entries: None,
                            seed,
                        };
                        match run_cell(algo, &g, k, d, suite, model) {
                            Ok((seeds, time, entries)) => {
                                record.coverage = Some(coverage_rate(&g, &seeds, d));
                                record.seconds = secs(time);
                                record.index_entries = Some(entries);
                                if algo == Algorithm::FastCover {
                                    record.setup_seconds = loaded.and_then(|m| secs(m.setup));
                                }
                            }
                            Err(status) => record.status = status,
                        }
                        records.push(record);
                    }
                }
            }
        }
    }
    Ok(records)
}

/// Writes a header and one row per record.
pub fn emit_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<(), BenchError> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_csv(records: &[BenchRecord], path: &Path) -> Result<(), BenchError> {
    emit_csv(records, std::fs::File::create(path)?)
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<BenchRecord>, BenchError> {
    let mut reader = csv::Reader::from_reader(input);
    let records = reader.deserialize().collect::<Result<Vec<BenchRecord>, _>>()?;
    Ok(records)
}

/// Column order of [`emit_csv`].
pub const CSV_HEADER: [&str; 12] = [
    "solver",
    "graph",
    "n",
    "m",
    "d",
    "k",
    "status",
    "coverage",
    "seconds",
    "setup_seconds",
    "index_entries",
    "seed",
];
