//! `kdcover`: generate graphs, train scorers, solve instances and run
//! benchmark suites.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags, missing or
//! unreadable inputs), 2 on runtime failures (time limit, memory cap, I/O
//! while writing results).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "kdcover", version, about = "Budget-constrained d-hop dominating set solvers")]
struct Cli {
    /// TOML file with default values for any flag (flags win).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a seeded Erdős–Rényi graph as an edge list.
    Generate(GenerateArgs),
    /// Train a scorer on freshly generated Erdős–Rényi graphs.
    Train(TrainArgs),
    /// Select seeds on one graph with one algorithm.
    Solve(SolveArgs),
    /// Measure the coverage of a seed file or of a trained model.
    Eval(EvalArgs),
    /// Run a benchmark suite and write a CSV of results.
    Bench(BenchArgs),
}

#[derive(Debug, Args, Serialize)]
struct GenerateArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Generate a directed graph (default); `--directed false` for undirected.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    directed: Option<bool>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct TrainArgs {
    #[arg(long)]
    d: Option<usize>,
    /// grat, gat or gcn.
    #[arg(long)]
    arch: Option<String>,
    #[arg(long)]
    n_graphs: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    k_eval: Option<usize>,
    #[arg(long)]
    max_epochs: Option<usize>,
    #[arg(long)]
    patience: Option<usize>,
    /// sgd or adam.
    #[arg(long)]
    optimizer: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct SolveArgs {
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    directed: Option<bool>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// greedy, celf, greedy1, brute or fastcover.
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    model: Option<PathBuf>,
    /// Recorded in the metadata; every solver is deterministic.
    #[arg(long)]
    seed: Option<u64>,
    /// Seed file, one original vertex id per line.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Largest coverage index, in entries.
    #[arg(long)]
    memory_cap: Option<usize>,
    /// Leave the timing column empty.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    no_timing: Option<bool>,
}

#[derive(Debug, Args, Serialize)]
struct EvalArgs {
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    directed: Option<bool>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Seed file to score on `--graph`.
    #[arg(long)]
    seeds: Option<PathBuf>,
    /// Model to score; runs on `--graph` or on generated graphs.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    n_graphs: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct BenchArgs {
    /// TOML or JSON suite description.
    #[arg(long)]
    suite: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave timing columns empty so the CSV is reproducible byte for byte.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    no_timing: Option<bool>,
}

/// Error classes that decide the exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let config = cli.config.as_deref();
    let result = match &cli.command {
        Command::Generate(a) => commands::generate(a, config),
        Command::Train(a) => commands::train(a, config),
        Command::Solve(a) => commands::solve(a, config),
        Command::Eval(a) => commands::eval(a, config),
        Command::Bench(a) => commands::bench(a, config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Usage(e) | Failure::Runtime(e)) = &f;
            eprintln!("error: {e:#}");
            ExitCode::from(f.code())
        }
    }
}
