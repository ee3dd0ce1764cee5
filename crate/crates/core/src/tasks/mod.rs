//! Benchmark objectives over graph nodes.

mod centrality;
mod sir;
mod team;
mod testfns;

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::graph::{AdjacencyGraph, NodeId};
use crate::{Error, Result};

pub use centrality::{betweenness, degree_values, eigenvector_centrality};
pub use sir::{patient_zero_values, sir_from_sources, sir_simulate, SirParams};
pub use team::{jaccard, team_generate, team_objective, TeamConfig, TeamInstance, Threshold};
pub use testfns::{ackley, grid_function_values, rosenbrock, GridBox};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    #[default]
    Minimize,
    Maximize,
}

impl Direction {
    /// Whether `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Minimize => a < b,
            Direction::Maximize => a > b,
        }
    }

    /// Maps a value to the internal minimisation convention.
    pub fn to_min(self, v: f64) -> f64 {
        match self {
            Direction::Minimize => v,
            Direction::Maximize => -v,
        }
    }
}

/// A black-box function on a node universe.
pub trait Objective: Send + Sync {
    fn node_count(&self) -> usize;

    /// Noise-free value at `v`; deterministic.
    fn value(&self, v: NodeId) -> Result<f64>;

    /// Standard deviation of Gaussian observation noise.
    fn noise_sd(&self) -> f64 {
        0.0
    }

    fn direction(&self) -> Direction;

    /// Best value over all nodes, when known (used for regret).
    fn optimum(&self) -> Option<f64>;
}

/// An objective given by a precomputed value per node.
#[derive(Clone, Debug)]
pub struct TabulatedObjective {
    values: Arc<[f64]>,
    noise_sd: f64,
    direction: Direction,
    optimum: f64,
}

impl TabulatedObjective {
    /// The optimum is found by scanning every value.
    pub fn new(values: Vec<f64>, direction: Direction) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Input("objective needs at least one node".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("objective values must be finite".into()));
        }
        let optimum =
            values.iter().copied().reduce(|a, b| if direction.better(b, a) { b } else { a }).expect("non-empty");
        Ok(Self { values: values.into(), noise_sd: 0.0, direction, optimum })
    }

    pub fn with_noise(mut self, sd: f64) -> Self {
        self.noise_sd = sd.max(0.0);
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Nodes attaining the optimum.
    pub fn optimal_nodes(&self) -> Vec<NodeId> {
        self.values.iter().enumerate().filter(|(_, &v)| v == self.optimum).map(|(i, _)| NodeId::from(i)).collect()
    }
}

impl Objective for TabulatedObjective {
    fn node_count(&self) -> usize {
        self.values.len()
    }
    fn value(&self, v: NodeId) -> Result<f64> {
        self.values
            .get(v.index())
            .copied()
            .ok_or_else(|| Error::Objective(format!("node {v} outside objective domain")))
    }
    fn noise_sd(&self) -> f64 {
        self.noise_sd
    }
    fn direction(&self) -> Direction {
        self.direction
    }
    fn optimum(&self) -> Option<f64> {
        Some(self.optimum)
    }
}

/// One observation of an objective.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation {
    pub node: NodeId,
    /// Noisy observed value, objective units.
    pub observed: f64,
    /// Noise-free value.
    pub truth: f64,
}

/// Per-run evaluation state: noise stream and evaluation counter.
pub struct Evaluator<'a, R> {
    objective: &'a dyn Objective,
    rng: R,
    count: usize,
}

impl<'a, R: Rng> Evaluator<'a, R> {
    pub fn new(objective: &'a dyn Objective, noise_rng: R) -> Self {
        Self { objective, rng: noise_rng, count: 0 }
    }

    pub fn observe(&mut self, v: NodeId) -> Result<Observation> {
        let truth = self.objective.value(v).map_err(|e| e.context(format!("evaluating node {v}")))?;
        let sd = self.objective.noise_sd();
        let observed =
            if sd > 0.0 { truth + Normal::new(0.0, sd).expect("sd is positive").sample(&mut self.rng) } else { truth };
        self.count += 1;
        Ok(Observation { node: v, observed, truth })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn objective(&self) -> &'a dyn Objective {
        self.objective
    }
}

/// Simple-regret trace: `|optimum − incumbent|`, oriented so it is zero
/// exactly when the optimum is attained.
pub fn regret(incumbents: &[f64], optimum: f64, direction: Direction) -> Vec<f64> {
    incumbents
        .iter()
        .map(|&v| match direction {
            Direction::Minimize => (v - optimum).max(0.0),
            Direction::Maximize => (optimum - v).max(0.0),
        })
        .collect()
}

/// Node degrees as a maximisation objective.
pub fn degree_objective(g: &AdjacencyGraph) -> TabulatedObjective {
    TabulatedObjective::new(degree_values(g), Direction::Maximize).expect("graph has nodes")
}
