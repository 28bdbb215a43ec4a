use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context};
use serde::{Deserialize, Serialize};
use serde_json::json;

use kdcover::bench::{run_suite, write_csv, RunOptions, Suite};
use kdcover::gen::{derive_seed, erdos_renyi, GenSpec};
use kdcover::graph::{coverage_rate, read_edge_list, write_edge_list, write_seeds, EdgeList, Graph, SeedSet};
use kdcover::neural::{
    load_model, mean_top_k_coverage, save_model, train as train_model, Architecture, Model,
    OptimizerKind, TrainConfig,
};
use kdcover::solvers::{fastcover_seeds, solve as run_solver, Algorithm, Limits, SolveError, SolveOptions};

use crate::config::resolve;
use crate::{BenchArgs, EvalArgs, Failure, GenerateArgs, SolveArgs, TrainArgs};

type Outcome = Result<(), Failure>;

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

fn yes() -> bool {
    true
}

/// `<out>.meta.json` next to every artifact: the resolved settings and
/// anything else needed to reproduce it. Contains no timestamps.
fn write_sidecar<S: Serialize>(out: &Path, command: &str, settings: &S, details: serde_json::Value) -> Outcome {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    let meta = json!({
        "tool": "kdcover",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "settings": settings,
        "details": details,
    });
    let text = serde_json::to_string_pretty(&meta).map_err(runtime)? + "\n";
    std::fs::write(PathBuf::from(name), text).map_err(runtime)
}

fn load_graph(path: &Path, directed: bool) -> Result<EdgeList, Failure> {
    read_edge_list(path, directed).with_context(|| format!("reading graph {}", path.display())).map_err(usage)
}

fn load(path: &Path) -> Result<Model, Failure> {
    load_model(path).with_context(|| format!("reading model {}", path.display())).map_err(usage)
}

fn solver_failure(e: SolveError) -> Failure {
    if e.is_resource_limit() {
        runtime(e)
    } else {
        usage(e)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct GenerateSettings {
    n: usize,
    p: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default = "yes")]
    directed: bool,
    out: PathBuf,
}

pub fn generate(args: &GenerateArgs, config: Option<&Path>) -> Outcome {
    let s: GenerateSettings = resolve(args, config, "generate").map_err(usage)?;
    let spec = GenSpec { n: s.n, p: s.p, seed: s.seed, directed: s.directed };
    let g = erdos_renyi(&spec).map_err(usage)?;
    let file = File::create(&s.out).with_context(|| format!("creating {}", s.out.display())).map_err(runtime)?;
    write_edge_list(&g, s.directed, BufWriter::new(file)).map_err(runtime)?;
    let details = json!({ "n": g.n(), "arcs": g.m(), "content_hash": g.content_hash() });
    write_sidecar(&s.out, "generate", &s, details)
}

#[derive(Debug, Serialize, Deserialize)]
struct TrainSettings {
    d: usize,
    #[serde(default = "default_arch")]
    arch: Architecture,
    #[serde(default = "default_train_graphs")]
    n_graphs: usize,
    #[serde(default = "default_n")]
    n: usize,
    #[serde(default = "default_p")]
    p: f64,
    #[serde(default = "default_lr")]
    lr: f64,
    #[serde(default = "default_lambda")]
    lambda: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    k_eval: Option<usize>,
    #[serde(default = "default_max_epochs")]
    max_epochs: usize,
    #[serde(default = "default_patience")]
    patience: usize,
    #[serde(default = "default_optimizer")]
    optimizer: OptimizerKind,
    out: PathBuf,
}

fn default_arch() -> Architecture {
    Architecture::Grat
}
fn default_train_graphs() -> usize {
    20
}
fn default_eval_graphs() -> usize {
    10
}
fn default_n() -> usize {
    1000
}
fn default_p() -> f64 {
    0.01
}
fn default_lr() -> f64 {
    TrainConfig::new(Architecture::Grat, 1).lr
}
fn default_lambda() -> f64 {
    1.0
}
fn default_max_epochs() -> usize {
    20
}
fn default_patience() -> usize {
    5
}
fn default_optimizer() -> OptimizerKind {
    OptimizerKind::Sgd
}

fn generated_graphs(count: usize, n: usize, p: f64, seed: u64) -> Result<Vec<Graph>, Failure> {
    (0..count as u64)
        .map(|i| erdos_renyi(&GenSpec::directed(n, p, derive_seed(seed, i))).map_err(usage))
        .collect()
}

pub fn train(args: &TrainArgs, config: Option<&Path>) -> Outcome {
    let s: TrainSettings = resolve(args, config, "train").map_err(usage)?;
    if s.d == 0 {
        return Err(usage(anyhow!("--d must be at least 1")));
    }
    let graphs = generated_graphs(s.n_graphs, s.n, s.p, s.seed)?;
    let mut cfg = TrainConfig::new(s.arch, s.d);
    cfg.k_eval = s.k_eval.unwrap_or(cfg.k_eval).min(s.n);
    cfg.lr = s.lr;
    cfg.lambda = s.lambda;
    cfg.seed = s.seed;
    cfg.max_epochs = s.max_epochs;
    cfg.patience = s.patience;
    cfg.optimizer = s.optimizer;
    cfg.cache_dir = std::env::var_os("KDCOVER_CACHE_DIR").map(PathBuf::from);
    let outcome = train_model(&cfg, &graphs).map_err(usage)?;

    let mut out = csv::Writer::from_writer(std::io::stdout().lock());
    out.write_record(["epoch", "train_loss", "val_coverage"]).map_err(runtime)?;
    for r in &outcome.history {
        out.serialize((r.epoch, r.train_loss, r.val_coverage)).map_err(runtime)?;
    }
    out.flush().map_err(runtime)?;

    save_model(&outcome.model, &s.out).with_context(|| format!("writing {}", s.out.display())).map_err(runtime)?;
    let details = json!({
        "k_eval": cfg.k_eval,
        "best_epoch": outcome.best_epoch,
        "best_val_coverage": outcome.best_val_coverage,
        "history": outcome.history,
        "parameters": outcome.model.param_count(),
    });
    write_sidecar(&s.out, "train", &s, details)
}

#[derive(Debug, Serialize, Deserialize)]
struct SolveSettings {
    graph: PathBuf,
    #[serde(default = "yes")]
    directed: bool,
    d: usize,
    k: usize,
    algo: Algorithm,
    #[serde(default)]
    model: Option<PathBuf>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    out: Option<PathBuf>,
    #[serde(default)]
    time_limit: Option<f64>,
    #[serde(default)]
    memory_cap: Option<usize>,
    #[serde(default)]
    no_timing: bool,
}

pub fn solve(args: &SolveArgs, config: Option<&Path>) -> Outcome {
    let s: SolveSettings = resolve(args, config, "solve").map_err(usage)?;
    let el = load_graph(&s.graph, s.directed)?;
    let g = &el.graph;
    let model = match (&s.model, s.algo) {
        (Some(path), _) => Some(load(path)?),
        (None, Algorithm::FastCover) => return Err(usage(anyhow!("fastcover needs --model"))),
        (None, _) => None,
    };
    let limits = Limits {
        time_limit: match s.time_limit {
            Some(t) if t > 0.0 && t.is_finite() => Some(std::time::Duration::from_secs_f64(t)),
            Some(t) => return Err(usage(anyhow!("--time-limit must be positive, got {t}"))),
            None => None,
        },
        memory_cap: s.memory_cap,
    };

    let start = Instant::now();
    let seeds = if s.algo == Algorithm::FastCover {
        if s.d == 0 || s.k == 0 || s.k > g.n() {
            return Err(usage(anyhow!("need d >= 1 and 1 <= k <= {}", g.n())));
        }
        // Timed part is inference only; gains are measured afterwards.
        let picked = fastcover_seeds(model.as_ref().expect("checked above"), g, s.k);
        let elapsed = start.elapsed();
        (SeedSet::with_gains(g, picked, s.d), elapsed)
    } else {
        let options = SolveOptions { limits, model: model.as_ref(), ..Default::default() };
        let report = run_solver(s.algo, g, s.k, s.d, &options).map_err(solver_failure)?;
        (report.seeds, start.elapsed())
    };
    let (seeds, elapsed) = seeds;
    let coverage = coverage_rate(g, &seeds.seeds, s.d);

    if let Some(out) = &s.out {
        let file = File::create(out).with_context(|| format!("creating {}", out.display())).map_err(runtime)?;
        write_seeds(&seeds.seeds, &el.ids, BufWriter::new(file)).map_err(runtime)?;
        let original: Vec<i64> = seeds.seeds.iter().map(|&v| el.ids.original(v)).collect();
        let details = json!({
            "graph_hash": g.content_hash(),
            "n": g.n(),
            "arcs": g.m(),
            "seeds": original,
            "gains": seeds.gains,
            "coverage": coverage,
        });
        write_sidecar(out, "solve", &s, details)?;
    }

    let mut out = csv::Writer::from_writer(std::io::stdout().lock());
    out.write_record(["solver", "graph", "n", "m", "d", "k", "seeds", "coverage", "seconds"])
        .map_err(runtime)?;
    let seconds = (!s.no_timing).then_some(elapsed.as_secs_f64());
    out.serialize((
        s.algo.name(),
        s.graph.display().to_string(),
        g.n(),
        g.m(),
        s.d,
        s.k,
        seeds.len(),
        coverage,
        seconds,
    ))
    .map_err(runtime)?;
    out.flush().map_err(runtime)
}

#[derive(Debug, Serialize, Deserialize)]
struct EvalSettings {
    #[serde(default)]
    graph: Option<PathBuf>,
    #[serde(default = "yes")]
    directed: bool,
    d: usize,
    #[serde(default)]
    k: Option<usize>,
    #[serde(default)]
    seeds: Option<PathBuf>,
    #[serde(default)]
    model: Option<PathBuf>,
    #[serde(default = "default_eval_graphs")]
    n_graphs: usize,
    #[serde(default = "default_n")]
    n: usize,
    #[serde(default = "default_p")]
    p: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct EvalRow {
    graph: String,
    n: Option<usize>,
    m: Option<usize>,
    d: usize,
    k: usize,
    coverage: f64,
}

fn read_seed_file(path: &Path, el: &EdgeList) -> Result<Vec<usize>, Failure> {
    let file = File::open(path).with_context(|| format!("reading seeds {}", path.display())).map_err(usage)?;
    let mut seeds = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(usage)?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let id: i64 = t.parse().map_err(|_| usage(anyhow!("{}:{}: bad vertex id {t:?}", path.display(), i + 1)))?;
        let v = el.ids.dense(id).ok_or_else(|| usage(anyhow!("seed {id} is not a vertex of the graph")))?;
        seeds.push(v);
    }
    Ok(seeds)
}

pub fn eval(args: &EvalArgs, config: Option<&Path>) -> Outcome {
    let s: EvalSettings = resolve(args, config, "eval").map_err(usage)?;
    if s.d == 0 {
        return Err(usage(anyhow!("--d must be at least 1")));
    }
    let mut rows = Vec::new();
    match (&s.seeds, &s.model) {
        (Some(seed_path), None) => {
            let graph = s.graph.as_ref().ok_or_else(|| usage(anyhow!("--seeds needs --graph")))?;
            let el = load_graph(graph, s.directed)?;
            let seeds = read_seed_file(seed_path, &el)?;
            rows.push(EvalRow {
                graph: graph.display().to_string(),
                n: Some(el.graph.n()),
                m: Some(el.graph.m()),
                d: s.d,
                k: seeds.len(),
                coverage: coverage_rate(&el.graph, &seeds, s.d),
            });
        }
        (None, Some(model_path)) => {
            let model = load(model_path)?;
            let k = s.k.unwrap_or_else(|| TrainConfig::default_k_eval(s.d));
            let graphs: Vec<(String, Graph)> = match &s.graph {
                Some(path) => vec![(path.display().to_string(), load_graph(path, s.directed)?.graph)],
                None => generated_graphs(s.n_graphs, s.n, s.p, s.seed)?
                    .into_iter()
                    .enumerate()
                    .map(|(i, g)| (format!("er-{i}"), g))
                    .collect(),
            };
            for (name, g) in &graphs {
                rows.push(EvalRow {
                    graph: name.clone(),
                    n: Some(g.n()),
                    m: Some(g.m()),
                    d: s.d,
                    k,
                    coverage: mean_top_k_coverage(&model, std::slice::from_ref(g), s.d, k),
                });
            }
            let mean = rows.iter().map(|r| r.coverage).sum::<f64>() / rows.len() as f64;
            rows.push(EvalRow { graph: "mean".into(), n: None, m: None, d: s.d, k, coverage: mean });
        }
        _ => return Err(usage(anyhow!("give exactly one of --seeds or --model"))),
    }

    let emit = |w: &mut dyn Write| -> anyhow::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &rows {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    };
    emit(&mut std::io::stdout().lock()).map_err(runtime)?;
    if let Some(out) = &s.out {
        let mut file = File::create(out).with_context(|| format!("creating {}", out.display())).map_err(runtime)?;
        emit(&mut file).map_err(runtime)?;
        write_sidecar(out, "eval", &s, json!({}))?;
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct BenchSettings {
    suite: PathBuf,
    out: PathBuf,
    #[serde(default)]
    no_timing: bool,
}

pub fn bench(args: &BenchArgs, config: Option<&Path>) -> Outcome {
    let s: BenchSettings = resolve(args, config, "bench").map_err(usage)?;
    let suite = Suite::from_path(&s.suite)
        .with_context(|| format!("reading suite {}", s.suite.display()))
        .map_err(usage)?;
    suite.validate().map_err(usage)?;
    let base = s.suite.parent().unwrap_or(Path::new("."));
    let records = run_suite(&suite, base, RunOptions { timing: !s.no_timing }).map_err(usage)?;
    write_csv(&records, &s.out).with_context(|| format!("writing {}", s.out.display())).map_err(runtime)?;
    write_sidecar(&s.out, "bench", &s, json!({ "suite": suite, "rows": records.len() }))
}
