use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{build_task, ExperimentConfig, MethodSpec, TaskInstance};
use super::stats::{mean_stderr, median};
use crate::baselines::{search, SearcherConfig};
use crate::engine::{run, RunResult};
use crate::graph::GraphOracle;
use crate::tasks::{Direction, Objective};
use crate::{Error, Result};

/// Column order of every per-cell CSV.
pub const CSV_HEADER: [&str; 7] =
    ["iteration", "node_id", "observed_y", "incumbent_y", "regret", "wall_ms", "adjacency_queries"];

/// Stable per-cell seed from `(master seed, method tag, seed index)`.
pub fn cell_seed(master: u64, method: &str, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(method.as_bytes());
    h.update([0u8]);
    h.update(index.to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

/// Execution options that are not part of the experiment itself.
#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Overrides the config's `output_dir`.
    pub out_dir: Option<PathBuf>,
    /// Worker threads; `None` uses all cores.
    pub jobs: Option<usize>,
    /// Directory relative paths in the config resolve against.
    pub base_dir: PathBuf,
    /// Overrides the config's `master_seed`.
    pub master_seed: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { out_dir: None, jobs: None, base_dir: PathBuf::from("."), master_seed: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub seed: u64,
    pub error: String,
}

/// Per-method aggregates across seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub seeds: Vec<u64>,
    pub failures: Vec<CellFailure>,
    pub mean_regret: Vec<f64>,
    /// Omitted with fewer than two successful seeds.
    pub stderr_regret: Option<Vec<f64>>,
    pub mean_incumbent: Vec<f64>,
    pub stderr_incumbent: Option<Vec<f64>>,
    pub final_regret_mean: Option<f64>,
    pub final_regret_median: Option<f64>,
    pub mean_adjacency_queries: Option<f64>,
    pub mean_revealed_nodes: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskSummary {
    pub name: String,
    pub nodes: usize,
    pub edges: usize,
    pub direction: Direction,
    pub optimum: f64,
}

/// Contents of `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub name: String,
    pub config: ExperimentConfig,
    pub task: TaskSummary,
    pub methods: Vec<MethodSummary>,
}

/// Everything a run produced, in memory.
#[derive(Debug)]
pub struct ExperimentOutcome {
    pub summary: ExperimentSummary,
    /// `(method, seed index, result)` for every cell, in config order.
    pub cells: Vec<(MethodSpec, u64, Result<RunResult>)>,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentOutcome {
    pub fn successful(&self, method: MethodSpec) -> impl Iterator<Item = &RunResult> {
        self.cells.iter().filter(move |(m, _, _)| *m == method).filter_map(|(_, _, r)| r.as_ref().ok())
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn write_cell_csv<W: std::io::Write>(w: W, result: &RunResult, with_wall_time: bool) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in &result.records {
        out.write_record([
            r.iteration.to_string(),
            r.node.to_string(),
            fmt_f64(r.observed),
            fmt_f64(r.incumbent),
            r.regret.map(fmt_f64).unwrap_or_default(),
            if with_wall_time { format!("{:.3}", r.wall_ms) } else { String::new() },
            r.adjacency_queries.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn run_cell(task: &TaskInstance, config: &ExperimentConfig, method: MethodSpec, seed: u64) -> Result<RunResult> {
    let mut oracle = GraphOracle::new(&task.graph);
    match method {
        MethodSpec::Bo(k) => run(&mut oracle, &task.objective, &config.bo_config(seed, k)),
        MethodSpec::Search(m) => search(&mut oracle, &task.objective, &SearcherConfig::new(m, config.budget, seed)),
    }
}

fn column_stats(rows: &[Vec<f64>]) -> (Vec<f64>, Option<Vec<f64>>) {
    let len = rows.iter().map(Vec::len).min().unwrap_or(0);
    let mut mean = Vec::with_capacity(len);
    let mut se = Vec::with_capacity(len);
    for i in 0..len {
        let col: Vec<f64> = rows.iter().map(|r| r[i]).collect();
        let (m, s) = mean_stderr(&col);
        mean.push(m);
        se.extend(s);
    }
    let se = (rows.len() >= 2).then_some(se);
    (mean, se)
}

fn summarize(method: MethodSpec, cells: &[(MethodSpec, u64, Result<RunResult>)]) -> MethodSummary {
    let mine: Vec<&(MethodSpec, u64, Result<RunResult>)> = cells.iter().filter(|c| c.0 == method).collect();
    let ok: Vec<(u64, &RunResult)> = mine.iter().filter_map(|(_, s, r)| r.as_ref().ok().map(|r| (*s, r))).collect();
    let failures = mine
        .iter()
        .filter_map(|(_, s, r)| r.as_ref().err().map(|e| CellFailure { seed: *s, error: e.to_string() }))
        .collect();
    let regrets: Vec<Vec<f64>> = ok.iter().filter_map(|(_, r)| r.regrets()).collect();
    let incumbents: Vec<Vec<f64>> = ok.iter().map(|(_, r)| r.incumbents()).collect();
    let (mean_regret, stderr_regret) = column_stats(&regrets);
    let (mean_incumbent, stderr_incumbent) = column_stats(&incumbents);
    let finals: Vec<f64> = ok.iter().filter_map(|(_, r)| r.final_regret()).collect();
    let avg = |xs: Vec<f64>| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
    MethodSummary {
        method: method.to_string(),
        seeds: ok.iter().map(|(s, _)| *s).collect(),
        failures,
        mean_regret,
        stderr_regret,
        mean_incumbent,
        stderr_incumbent,
        final_regret_mean: avg(finals.clone()),
        final_regret_median: (!finals.is_empty()).then(|| median(&finals)),
        mean_adjacency_queries: avg(ok.iter().map(|(_, r)| r.adjacency_queries as f64).collect()),
        mean_revealed_nodes: avg(ok.iter().map(|(_, r)| r.revealed_nodes as f64).collect()),
    }
}

/// Path of the CSV for one cell below `out`.
pub fn cell_path(out: &Path, method: MethodSpec, seed: u64) -> PathBuf {
    out.join("cells").join(method.to_string()).join(format!("seed_{seed}.csv"))
}

/// Runs every `(method, seed)` cell, writing per-cell CSVs and
/// `summary.json` when an output directory is configured. A failing cell is
/// recorded in the summary and does not stop the others.
pub fn run_experiment(config: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentOutcome> {
    config.validate()?;
    let mut config = config.clone();
    if let Some(s) = opts.master_seed {
        config.master_seed = s;
    }
    let task =
        build_task(&config.task, config.graph.as_ref(), &opts.base_dir).map_err(|e| e.context("building task"))?;
    let out_dir = opts.out_dir.clone().or_else(|| config.output_dir.as_ref().map(|p| opts.base_dir.join(p)));

    let jobs: Vec<(MethodSpec, u64)> =
        config.methods.iter().flat_map(|&m| config.seeds.indices().into_iter().map(move |s| (m, s))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let cfg = &config;
    let task_ref = &task;
    let out_ref = out_dir.as_deref();
    let cells: Vec<(MethodSpec, u64, Result<RunResult>)> = pool.install(|| {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|&(m, s)| {
                let seed = cell_seed(cfg.master_seed, &m.to_string(), s);
                let res = run_cell(task_ref, cfg, m, seed).map_err(|e| e.context(format!("cell {m} seed {s}")));
                let res = match (res, out_ref) {
                    (Ok(r), Some(dir)) => {
                        let path = cell_path(dir, m, s);
                        let written = std::fs::create_dir_all(path.parent().expect("cell path has a parent"))
                            .map_err(Error::from)
                            .and_then(|_| std::fs::File::create(&path).map_err(Error::from))
                            .and_then(|f| write_cell_csv(std::io::BufWriter::new(f), &r, cfg.record_wall_time));
                        written.map(|_| r).map_err(|e| e.context(format!("writing {}", path.display())))
                    }
                    (res, _) => res,
                };
                if let Err(e) = &res {
                    log::warn!("{e}");
                }
                (m, s, res)
            })
            .collect()
    });

    let summary = ExperimentSummary {
        name: config.name.clone(),
        task: TaskSummary {
            name: config.task.name().into(),
            nodes: task.graph.node_count(),
            edges: task.graph.edge_count(),
            direction: task.objective.direction(),
            optimum: task.objective.optimum().expect("tabulated objectives know their optimum"),
        },
        methods: config.methods.iter().map(|&m| summarize(m, &cells)).collect(),
        config,
    };
    if let Some(dir) = &out_dir {
        std::fs::create_dir_all(dir)?;
        let f = std::fs::File::create(dir.join("summary.json"))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(f), &summary)?;
    }
    Ok(ExperimentOutcome { summary, cells, out_dir })
}
