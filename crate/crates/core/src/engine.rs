//! The optimisation loop: random (re)initialisation, ego-net construction
//! around the incumbent, GP fit, expected-improvement selection and the
//! trust-region controller that sizes the ego-net.
//!
//! Internally everything is minimised. Maximisation objectives are negated
//! on the way in and reported values are converted back.

use std::collections::HashSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::acquisition::select_next;
use crate::gp::{fit, FitConfig, TrainSet};
use crate::graph::{ego_subgraph, AdjacencySource, GraphOracle, NodeId};
use crate::spectral::KernelFamily;
use crate::tasks::{Direction, Evaluator, Objective, Observation};
use crate::{Error, Result};

/// Trust-region hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrustRegionConfig {
    pub q0: usize,
    pub succ_tol: usize,
    pub fail_tol: usize,
    pub gamma: f64,
    pub q_min: usize,
    /// Hard cap on the ego-net size on top of the node count.
    pub q_max: Option<usize>,
}

impl Default for TrustRegionConfig {
    fn default() -> Self {
        Self { q0: 100, succ_tol: 3, fail_tol: 10, gamma: 1.5, q_min: 1, q_max: None }
    }
}

impl TrustRegionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 1.0) || !self.gamma.is_finite() {
            return Err(Error::Config(format!("trust-region multiplier must exceed 1, got {}", self.gamma)));
        }
        if self.q_min < 1 {
            return Err(Error::Config("q_min must be at least 1".into()));
        }
        if self.q0 < self.q_min {
            return Err(Error::Config(format!("q0 = {} is below q_min = {}", self.q0, self.q_min)));
        }
        if self.succ_tol < 1 || self.fail_tol < 1 {
            return Err(Error::Config("success and failure tolerances must be at least 1".into()));
        }
        if self.q_max.is_some_and(|m| m < self.q_min) {
            return Err(Error::Config("q_max must be at least q_min".into()));
        }
        Ok(())
    }
}

/// Ego-net size controller.
#[derive(Clone, Debug, PartialEq)]
pub struct TrustRegionState {
    pub q: usize,
    pub successes: usize,
    pub failures: usize,
    pub restart: bool,
    cap: usize,
    config: TrustRegionConfig,
}

impl TrustRegionState {
    /// Fresh state for a node universe of size `n`.
    pub fn new(config: TrustRegionConfig, n: usize) -> Self {
        let cap = config.q_max.map_or(n, |m| m.min(n)).max(config.q_min);
        let q = config.q0.min(cap);
        Self { q, successes: 0, failures: 0, restart: q <= config.q_min, cap, config }
    }

    pub fn config(&self) -> &TrustRegionConfig {
        &self.config
    }

    /// Largest size the region may grow to.
    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Records one iteration outcome.
    pub fn update(&mut self, improved: bool) {
        let c = &self.config;
        if improved {
            self.successes += 1;
            self.failures = 0;
            if self.successes >= c.succ_tol {
                self.q = ((c.gamma * self.q as f64).round() as usize).min(self.cap);
                self.successes = 0;
            }
        } else {
            self.failures += 1;
            self.successes = 0;
            if self.failures >= c.fail_tol {
                self.q = ((self.q as f64 / c.gamma).round() as usize).max(c.q_min);
                self.failures = 0;
            }
        }
        self.restart = self.q <= c.q_min;
    }
}

/// Functional form of [`TrustRegionState::update`].
pub fn tr_update(mut state: TrustRegionState, improved: bool) -> TrustRegionState {
    state.update(improved);
    state
}

/// Options of the full optimisation loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoConfig {
    /// Random evaluations at initialisation and at every restart.
    pub n0: usize,
    /// Total objective evaluations, initial draws included.
    pub budget: usize,
    pub kernel: KernelFamily,
    pub trust_region: TrustRegionConfig,
    pub fit: FitConfig,
    pub seed: u64,
}

impl Default for BoConfig {
    fn default() -> Self {
        Self {
            n0: 10,
            budget: 100,
            kernel: KernelFamily::SumInverse,
            trust_region: TrustRegionConfig::default(),
            fit: FitConfig::default(),
            seed: 0,
        }
    }
}

impl BoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n0 < 1 {
            return Err(Error::Config("n0 must be at least 1".into()));
        }
        if self.budget < self.n0 {
            return Err(Error::Config(format!("budget {} is smaller than n0 = {}", self.budget, self.n0)));
        }
        self.trust_region.validate()
    }
}

/// How an evaluation was chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// Uniform draw at initialisation or restart.
    Random,
    /// Expected-improvement maximiser.
    Acquisition,
    /// Random ego-net node after a failed surrogate fit.
    Fallback,
    /// Chosen by a baseline searcher.
    Search,
}

/// One objective evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based evaluation index.
    pub iteration: usize,
    pub node: NodeId,
    pub observed: f64,
    pub truth: f64,
    /// Best observed value so far, objective units.
    pub incumbent: f64,
    /// Simple regret of the best true value so far, when the optimum is known.
    pub regret: Option<f64>,
    /// Time since the previous evaluation finished.
    pub wall_ms: f64,
    /// Cumulative neighbour queries.
    pub adjacency_queries: u64,
    pub kind: StepKind,
    /// Ego-net size target in force, for acquisition steps.
    pub q: Option<usize>,
}

/// Outcome of one optimisation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub records: Vec<IterationRecord>,
    pub best_node: NodeId,
    /// Best observed value, objective units.
    pub best_value: f64,
    pub restarts: usize,
    pub fit_failures: usize,
    pub exhausted_ego_nets: usize,
    /// Distinct nodes whose neighbour lists were read.
    pub revealed_nodes: usize,
    pub adjacency_queries: u64,
}

impl RunResult {
    pub fn incumbents(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.incumbent).collect()
    }

    pub fn regrets(&self) -> Option<Vec<f64>> {
        self.records.iter().map(|r| r.regret).collect()
    }

    pub fn final_regret(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.regret)
    }

    pub fn evaluations(&self) -> usize {
        self.records.len()
    }
}

/// Bookkeeping shared by every searcher: evaluation, incumbents, timing.
pub(crate) struct Recorder<'a, R> {
    eval: Evaluator<'a, R>,
    direction: Direction,
    optimum: Option<f64>,
    pub(crate) visited: HashSet<NodeId>,
    records: Vec<IterationRecord>,
    best: Option<(NodeId, f64)>,
    best_truth: Option<f64>,
    clock: Instant,
}

impl<'a, R: Rng> Recorder<'a, R> {
    pub(crate) fn new(objective: &'a dyn Objective, noise_rng: R) -> Self {
        Self {
            eval: Evaluator::new(objective, noise_rng),
            direction: objective.direction(),
            optimum: objective.optimum(),
            visited: HashSet::new(),
            records: Vec::new(),
            best: None,
            best_truth: None,
            clock: Instant::now(),
        }
    }

    pub(crate) fn evaluations(&self) -> usize {
        self.records.len()
    }

    pub(crate) fn direction(&self) -> Direction {
        self.direction
    }

    /// Evaluates `v`, which must be unvisited.
    pub(crate) fn observe(&mut self, v: NodeId, kind: StepKind, q: Option<usize>, queries: u64) -> Result<Observation> {
        debug_assert!(!self.visited.contains(&v), "node {v} evaluated twice");
        let obs = self.eval.observe(v)?;
        self.visited.insert(v);
        let d = self.direction;
        if self.best.is_none_or(|(_, b)| d.better(obs.observed, b)) {
            self.best = Some((v, obs.observed));
        }
        if self.best_truth.is_none_or(|b| d.better(obs.truth, b)) {
            self.best_truth = Some(obs.truth);
        }
        let regret = self.optimum.map(|opt| {
            let b = self.best_truth.expect("set above");
            crate::tasks::regret(&[b], opt, d)[0]
        });
        let now = Instant::now();
        let wall_ms = now.duration_since(self.clock).as_secs_f64() * 1e3;
        self.clock = now;
        self.records.push(IterationRecord {
            iteration: self.records.len() + 1,
            node: v,
            observed: obs.observed,
            truth: obs.truth,
            incumbent: self.best.expect("set above").1,
            regret,
            wall_ms,
            adjacency_queries: queries,
            kind,
            q,
        });
        Ok(obs)
    }

    /// Draws an unvisited node uniformly, or `None` when none remain.
    pub(crate) fn sample_unvisited<G: Rng + ?Sized>(&self, n: usize, rng: &mut G) -> Option<NodeId> {
        if self.visited.len() >= n {
            return None;
        }
        // rejection is cheap while most nodes are unvisited
        if self.visited.len() * 2 <= n {
            loop {
                let v = NodeId::from(rng.random_range(0..n));
                if !self.visited.contains(&v) {
                    return Some(v);
                }
            }
        }
        let free: Vec<NodeId> = (0..n).map(NodeId::from).filter(|v| !self.visited.contains(v)).collect();
        Some(free[rng.random_range(0..free.len())])
    }

    pub(crate) fn finish(
        self,
        restarts: usize,
        fit_failures: usize,
        exhausted: usize,
        revealed: usize,
        queries: u64,
    ) -> Result<RunResult> {
        let (best_node, best_value) = self.best.ok_or_else(|| Error::Input("run made no evaluations".into()))?;
        Ok(RunResult {
            records: self.records,
            best_node,
            best_value,
            restarts,
            fit_failures,
            exhausted_ego_nets: exhausted,
            revealed_nodes: revealed,
            adjacency_queries: queries,
        })
    }
}

/// Independent algorithm and noise streams for one run.
pub(crate) fn rng_streams(seed: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let algo = ChaCha8Rng::seed_from_u64(seed);
    let mut noise = ChaCha8Rng::seed_from_u64(seed);
    noise.set_stream(1);
    (algo, noise)
}

/// Runs the optimiser until `min(budget, n)` evaluations have been made.
pub fn run<S: AdjacencySource>(
    oracle: &mut GraphOracle<S>,
    objective: &dyn Objective,
    config: &BoConfig,
) -> Result<RunResult> {
    config.validate()?;
    let n = oracle.node_count();
    if objective.node_count() != n {
        return Err(Error::Objective(format!(
            "objective covers {} nodes but the graph has {n}",
            objective.node_count()
        )));
    }
    let (mut rng, noise_rng) = rng_streams(config.seed);
    let mut rec = Recorder::new(objective, noise_rng);
    let dir = rec.direction();
    let budget = config.budget.min(n);
    let mut tr = TrustRegionState::new(config.trust_region, n);
    tr.restart = true;

    // since-restart data, internal minimisation units
    let mut local: Vec<(NodeId, f64)> = Vec::new();
    let mut local_best: Option<(NodeId, f64)> = None;
    let (mut restarts, mut fit_failures, mut exhausted) = (0usize, 0usize, 0usize);

    while rec.evaluations() < budget {
        if tr.restart {
            if rec.evaluations() > 0 {
                restarts += 1;
            }
            local.clear();
            local_best = None;
            tr = TrustRegionState::new(config.trust_region, n);
            tr.restart = false;
            let draws = config.n0.min(budget - rec.evaluations());
            for _ in 0..draws {
                let Some(v) = rec.sample_unvisited(n, &mut rng) else { break };
                let obs = rec.observe(v, StepKind::Random, None, oracle.query_count())?;
                let y = dir.to_min(obs.observed);
                local.push((v, y));
                if local_best.is_none_or(|(_, b)| y < b) {
                    local_best = Some((v, y));
                }
            }
            if local.is_empty() {
                log::info!("node universe exhausted after {} evaluations", rec.evaluations());
                break;
            }
            continue;
        }

        let (center, y_star) = local_best.expect("restart populates the local data");
        let ego = ego_subgraph(oracle, center, tr.q, &mut rng)?;
        let has_candidate = ego.nodes().iter().any(|v| !rec.visited.contains(v));
        if !has_candidate {
            exhausted += 1;
            tr.update(false);
            continue;
        }

        let (idx, ys): (Vec<usize>, Vec<f64>) = local.iter().filter_map(|&(v, y)| ego.local(v).map(|i| (i, y))).unzip();
        let train = TrainSet::new(idx, ys)?;
        let choice = match fit(&ego, &train, config.kernel, &config.fit, &mut rng) {
            Ok(model) => select_next(&model, &ego, &rec.visited, y_star)?.map(|a| (a.chosen, StepKind::Acquisition)),
            Err(e) => {
                log::debug!("surrogate fit failed, falling back to a random ego-net node: {e}");
                fit_failures += 1;
                let free: Vec<NodeId> = ego.nodes().iter().copied().filter(|v| !rec.visited.contains(v)).collect();
                Some((free[rng.random_range(0..free.len())], StepKind::Fallback))
            }
        };
        let Some((v, kind)) = choice else {
            exhausted += 1;
            tr.update(false);
            continue;
        };
        let obs = rec.observe(v, kind, Some(tr.q), oracle.query_count())?;
        let y = dir.to_min(obs.observed);
        local.push((v, y));
        let improved = y < y_star;
        if improved {
            local_best = Some((v, y));
        }
        tr.update(improved);
    }

    rec.finish(restarts, fit_failures, exhausted, oracle.revealed_count(), oracle.query_count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_grid2d, AdjacencyGraph};
    use crate::tasks::TabulatedObjective;

    fn tr(q0: usize, gamma: f64, succ: usize, fail: usize) -> TrustRegionState {
        let cfg = TrustRegionConfig { q0, gamma, succ_tol: succ, fail_tol: fail, q_min: 1, q_max: None };
        TrustRegionState::new(cfg, 10_000)
    }

    #[test]
    fn expand_after_success_streak() {
        let mut s = tr(50, 2.0, 3, 10);
        s.update(true);
        s.update(true);
        assert_eq!(s.q, 50);
        s.update(true);
        assert_eq!(s.q, 100);
        assert_eq!(s.successes, 0);
    }

    #[test]
    fn shrink_after_failure_streak() {
        let mut s = tr(50, 2.0, 3, 4);
        for _ in 0..4 {
            s = tr_update(s, false);
        }
        assert_eq!(s.q, 25);
        assert!(!s.restart);
    }

    #[test]
    fn restart_raised_at_q_min() {
        let mut s = tr(2, 2.0, 3, 2);
        s.update(false);
        s.update(false);
        assert_eq!(s.q, 1);
        assert!(s.restart);
    }

    #[test]
    fn success_resets_failures_and_cap_applies() {
        let mut s = TrustRegionState::new(TrustRegionConfig { q0: 8, q_max: Some(10), ..Default::default() }, 50);
        s.update(false);
        s.update(true);
        assert_eq!((s.successes, s.failures), (1, 0));
        s.update(true);
        s.update(true);
        assert_eq!(s.q, 10);
        let s = TrustRegionState::new(TrustRegionConfig::default(), 30);
        assert_eq!(s.q, 30);
    }

    fn grid_distance_objective(side: usize, target: NodeId) -> (AdjacencyGraph, TabulatedObjective) {
        let (g, _) = gen_grid2d(side).unwrap();
        let d: Vec<f64> = g.bfs_distances(target).iter().map(|d| d.unwrap() as f64).collect();
        (g, TabulatedObjective::new(d, Direction::Minimize).unwrap())
    }

    #[test]
    fn budget_equal_to_n0_is_pure_random() {
        let (g, obj) = grid_distance_objective(10, NodeId(55));
        let cfg = BoConfig { n0: 10, budget: 10, ..Default::default() };
        let res = run(&mut GraphOracle::new(&g), &obj, &cfg).unwrap();
        assert_eq!(res.evaluations(), 10);
        assert!(res.records.iter().all(|r| r.kind == StepKind::Random));
        let best = res.records.iter().map(|r| r.observed).fold(f64::INFINITY, f64::min);
        assert_eq!(res.best_value, best);
        assert_eq!(res.adjacency_queries, 0);
    }

    #[test]
    fn constant_objective_completes_budget() {
        let (g, _) = gen_grid2d(8).unwrap();
        let obj = TabulatedObjective::new(vec![1.0; 64], Direction::Minimize).unwrap();
        let cfg = BoConfig {
            n0: 3,
            budget: 40,
            trust_region: TrustRegionConfig { q0: 8, fail_tol: 2, gamma: 2.0, ..Default::default() },
            ..Default::default()
        };
        let res = run(&mut GraphOracle::new(&g), &obj, &cfg).unwrap();
        assert_eq!(res.evaluations(), 40);
        assert!(res.restarts >= 1);
        let nodes: HashSet<NodeId> = res.records.iter().map(|r| r.node).collect();
        assert_eq!(nodes.len(), 40);
    }

    #[test]
    fn grid_distance_solved_on_most_seeds() {
        let (g, obj) = grid_distance_objective(10, NodeId(37));
        let mut solved = 0;
        for seed in 0..10 {
            let cfg = BoConfig {
                budget: 60,
                kernel: KernelFamily::Diffusion,
                trust_region: TrustRegionConfig { q0: 20, ..Default::default() },
                seed,
                ..Default::default()
            };
            let res = run(&mut GraphOracle::new(&g), &obj, &cfg).unwrap();
            let inc = res.incumbents();
            assert!(inc.windows(2).all(|w| w[1] <= w[0]));
            solved += (*inc.last().unwrap() == 0.0) as usize;
        }
        assert!(solved >= 9, "solved {solved}/10");
    }

    #[test]
    fn evaluations_capped_by_node_count() {
        let (g, obj) = grid_distance_objective(4, NodeId(0));
        let cfg = BoConfig {
            n0: 5,
            budget: 100,
            trust_region: TrustRegionConfig { q0: 4, ..Default::default() },
            ..Default::default()
        };
        let res = run(&mut GraphOracle::new(&g), &obj, &cfg).unwrap();
        assert_eq!(res.evaluations(), 16);
        assert_eq!(res.final_regret(), Some(0.0));
    }

    #[test]
    fn maximisation_mirrors_negated_minimisation() {
        let g = crate::graph::gen_ba(80, 2, 3).unwrap();
        let f = crate::tasks::degree_values(&g);
        let max = TabulatedObjective::new(f.clone(), Direction::Maximize).unwrap();
        let min = TabulatedObjective::new(f.iter().map(|x| -x).collect(), Direction::Minimize).unwrap();
        let cfg = BoConfig {
            budget: 25,
            n0: 5,
            trust_region: TrustRegionConfig { q0: 20, ..Default::default() },
            ..Default::default()
        };
        let a = run(&mut GraphOracle::new(&g), &max, &cfg).unwrap();
        let b = run(&mut GraphOracle::new(&g), &min, &cfg).unwrap();
        let na: Vec<NodeId> = a.records.iter().map(|r| r.node).collect();
        let nb: Vec<NodeId> = b.records.iter().map(|r| r.node).collect();
        assert_eq!(na, nb);
        assert_eq!(a.best_value, -b.best_value);
        assert!(a.incumbents().windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn deterministic_under_seed() {
        let (g, obj) = grid_distance_objective(9, NodeId(10));
        let cfg = BoConfig {
            budget: 30,
            seed: 11,
            trust_region: TrustRegionConfig { q0: 15, ..Default::default() },
            ..Default::default()
        };
        let a = run(&mut GraphOracle::new(&g), &obj, &cfg).unwrap();
        let b = run(&mut GraphOracle::new(&g), &obj, &cfg).unwrap();
        let strip =
            |r: &RunResult| r.records.iter().map(|x| (x.node, x.observed, x.adjacency_queries)).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
    }

    #[test]
    fn config_errors() {
        let (g, obj) = grid_distance_objective(3, NodeId(0));
        let bad = BoConfig { n0: 10, budget: 5, ..Default::default() };
        assert!(matches!(run(&mut GraphOracle::new(&g), &obj, &bad), Err(Error::Config(_))));
        let bad =
            BoConfig { trust_region: TrustRegionConfig { gamma: 1.0, ..Default::default() }, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn sample_unvisited_exhaustion_clamp() {
        let obj = TabulatedObjective::new(vec![0.0; 10], Direction::Minimize).unwrap();
        let (_, noise) = rng_streams(0);
        let mut rec = Recorder::new(&obj, noise);
        for v in 0..9 {
            rec.observe(NodeId(v), StepKind::Random, None, 0).unwrap();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(rec.sample_unvisited(10, &mut rng), Some(NodeId(9)));
        rec.observe(NodeId(9), StepKind::Random, None, 0).unwrap();
        assert_eq!(rec.sample_unvisited(10, &mut rng), None);
    }
}
