//! Bayesian optimisation of black-box functions defined on the nodes of a graph.
//!
//! The optimiser never needs the whole graph. Around the current incumbent it
//! grows an ego-network of adaptive size, builds a Gaussian process whose
//! covariance is a spectral function of that subgraph's (scaled, normalised)
//! Laplacian, and picks the next node by enumerating expected improvement over
//! the subgraph. A trust-region controller expands or shrinks the subgraph and
//! restarts from fresh random nodes when it collapses.
//!
//! Module map:
//!
//! * [`graph`]: adjacency storage, random graph generators, edge-list loading,
//!   incremental topology access ([`graph::GraphOracle`]) and ego-network
//!   extraction.
//! * [`spectral`]: scaled Laplacian eigendecomposition and the spectral kernel
//!   families with analytic hyperparameter gradients.
//! * [`gp`]: GP regression over an ego-network, log-marginal-likelihood fitting
//!   and posterior prediction.
//! * [`acquisition`]: expected improvement and candidate enumeration.
//! * [`engine`]: the optimisation loop and trust-region controller.
//! * [`baselines`]: random, local, breadth-first and depth-first search.
//! * [`tasks`]: objective functions used for benchmarking.
//! * [`harness`]: experiment configuration, execution, kernel validation and
//!   rank aggregation.
//!
//! See the `examples/` directory for one runnable program per capability.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acquisition;
pub mod baselines;
pub mod engine;
mod error;
pub mod gp;
pub mod graph;
pub mod harness;
pub mod optim;
pub mod spectral;
pub mod tasks;

pub use error::{Error, Result};
pub use graph::{AdjacencyGraph, EgoNet, GraphOracle, NodeId};
