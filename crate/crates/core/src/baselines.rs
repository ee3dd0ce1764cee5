//! Comparison searchers sharing the engine's budget and logging contract:
//! each evaluates at most `min(budget, n)` distinct nodes and reads topology
//! only through neighbour queries.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{rng_streams, Recorder, RunResult, StepKind};
use crate::graph::{AdjacencySource, GraphOracle, NodeId};
use crate::tasks::Objective;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    Random,
    Local,
    Bfs,
    Dfs,
}

impl SearchMethod {
    pub const ALL: [SearchMethod; 4] =
        [SearchMethod::Random, SearchMethod::Local, SearchMethod::Bfs, SearchMethod::Dfs];

    pub fn as_str(self) -> &'static str {
        match self {
            SearchMethod::Random => "random",
            SearchMethod::Local => "local",
            SearchMethod::Bfs => "bfs",
            SearchMethod::Dfs => "dfs",
        }
    }
}

impl fmt::Display for SearchMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SearchMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SearchMethod::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown search method `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearcherConfig {
    pub method: SearchMethod,
    pub budget: usize,
    pub seed: u64,
    /// Starting node; drawn uniformly when absent.
    pub root: Option<NodeId>,
}

impl SearcherConfig {
    pub fn new(method: SearchMethod, budget: usize, seed: u64) -> Self {
        Self { method, budget, seed, root: None }
    }
}

/// Dispatches on `config.method`.
pub fn search<S: AdjacencySource>(
    oracle: &mut GraphOracle<S>,
    objective: &dyn Objective,
    config: &SearcherConfig,
) -> Result<RunResult> {
    if config.budget < 1 {
        return Err(Error::Config("search budget must be at least 1".into()));
    }
    let n = oracle.node_count();
    if objective.node_count() != n {
        return Err(Error::Objective(format!(
            "objective covers {} nodes but the graph has {n}",
            objective.node_count()
        )));
    }
    if let Some(r) = config.root {
        if r.index() >= n {
            return Err(Error::Input(format!("root {r} outside node universe")));
        }
    }
    match config.method {
        SearchMethod::Random => random_search(oracle, objective, config),
        SearchMethod::Local => local_search(oracle, objective, config),
        SearchMethod::Bfs => traversal(oracle, objective, config, false),
        SearchMethod::Dfs => traversal(oracle, objective, config, true),
    }
}

/// Uniform draws without replacement.
pub fn random_search<S: AdjacencySource>(
    oracle: &mut GraphOracle<S>,
    objective: &dyn Objective,
    config: &SearcherConfig,
) -> Result<RunResult> {
    let n = oracle.node_count();
    let (mut rng, noise) = rng_streams(config.seed);
    let mut rec = Recorder::new(objective, noise);
    let budget = config.budget.min(n);
    if let Some(r) = config.root {
        rec.observe(r, StepKind::Search, None, 0)?;
    }
    while rec.evaluations() < budget {
        let v = rec.sample_unvisited(n, &mut rng).expect("budget is at most n");
        rec.observe(v, StepKind::Search, None, 0)?;
    }
    rec.finish(0, 0, 0, oracle.revealed_count(), oracle.query_count())
}

/// Hill climbing by uniformly sampled unvisited neighbours, restarting at a
/// random unvisited node from a local optimum.
pub fn local_search<S: AdjacencySource>(
    oracle: &mut GraphOracle<S>,
    objective: &dyn Objective,
    config: &SearcherConfig,
) -> Result<RunResult> {
    let n = oracle.node_count();
    let (mut rng, noise) = rng_streams(config.seed);
    let mut rec = Recorder::new(objective, noise);
    let dir = objective.direction();
    let budget = config.budget.min(n);
    let mut restarts = 0;

    let start = match config.root {
        Some(r) => r,
        None => rec.sample_unvisited(n, &mut rng).expect("n is at least 1"),
    };
    let mut current = (start, rec.observe(start, StepKind::Search, None, oracle.query_count())?.observed);
    while rec.evaluations() < budget {
        let nb = oracle.neighbors(current.0)?;
        let free: Vec<NodeId> = nb.iter().copied().filter(|v| !rec.visited.contains(v)).collect();
        if free.is_empty() {
            // every neighbour is visited and none improved on `current`
            let v = rec.sample_unvisited(n, &mut rng).expect("budget is at most n");
            restarts += 1;
            current = (v, rec.observe(v, StepKind::Search, None, oracle.query_count())?.observed);
            continue;
        }
        let v = free[rng.random_range(0..free.len())];
        let y = rec.observe(v, StepKind::Search, None, oracle.query_count())?.observed;
        if dir.better(y, current.1) {
            current = (v, y);
        }
    }
    rec.finish(restarts, 0, 0, oracle.revealed_count(), oracle.query_count())
}

/// Breadth- or depth-first traversal evaluating nodes on discovery, with
/// neighbours expanded in ascending id order. A fresh random root is drawn
/// whenever the current component is exhausted.
fn traversal<S: AdjacencySource>(
    oracle: &mut GraphOracle<S>,
    objective: &dyn Objective,
    config: &SearcherConfig,
    depth_first: bool,
) -> Result<RunResult> {
    let n = oracle.node_count();
    let (mut rng, noise) = rng_streams(config.seed);
    let mut rec = Recorder::new(objective, noise);
    let budget = config.budget.min(n);
    let mut roots = 0usize;
    let mut next_root = config.root;

    'outer: while rec.evaluations() < budget {
        let root = match next_root.take() {
            Some(r) => r,
            None => rec.sample_unvisited(n, &mut rng).expect("budget is at most n"),
        };
        roots += 1;
        rec.observe(root, StepKind::Search, None, oracle.query_count())?;
        if depth_first {
            let mut stack: Vec<(Arc<[NodeId]>, usize)> = vec![(oracle.neighbors(root)?, 0)];
            while let Some((nb, pos)) = stack.last_mut() {
                let Some(offset) = nb[*pos..].iter().position(|v| !rec.visited.contains(v)) else {
                    stack.pop();
                    continue;
                };
                let w = nb[*pos + offset];
                *pos += offset + 1;
                if rec.evaluations() >= budget {
                    break 'outer;
                }
                rec.observe(w, StepKind::Search, None, oracle.query_count())?;
                if rec.evaluations() < budget {
                    let child = oracle.neighbors(w)?;
                    stack.push((child, 0));
                }
            }
        } else {
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                if rec.evaluations() >= budget {
                    break 'outer;
                }
                for &w in oracle.neighbors(u)?.iter() {
                    if rec.visited.contains(&w) {
                        continue;
                    }
                    if rec.evaluations() >= budget {
                        break 'outer;
                    }
                    rec.observe(w, StepKind::Search, None, oracle.query_count())?;
                    queue.push_back(w);
                }
            }
        }
    }
    rec.finish(roots.saturating_sub(1), 0, 0, oracle.revealed_count(), oracle.query_count())
}

pub fn bfs_search<S: AdjacencySource>(
    oracle: &mut GraphOracle<S>,
    objective: &dyn Objective,
    config: &SearcherConfig,
) -> Result<RunResult> {
    traversal(oracle, objective, config, false)
}

pub fn dfs_search<S: AdjacencySource>(
    oracle: &mut GraphOracle<S>,
    objective: &dyn Objective,
    config: &SearcherConfig,
) -> Result<RunResult> {
    traversal(oracle, objective, config, true)
}
