use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;

use super::{AdjacencyGraph, NodeId};
use crate::{Error, Result};

/// Anything that can answer "who are the neighbours of `v`?" over a node
/// universe of known size. Implementations may be lazy or remote; the
/// [`GraphOracle`] in front of them caches answers.
pub trait AdjacencySource {
    fn node_count(&self) -> usize;
    fn neighbors_of(&self, v: NodeId) -> Result<Vec<NodeId>>;
}

impl AdjacencySource for AdjacencyGraph {
    fn node_count(&self) -> usize {
        AdjacencyGraph::node_count(self)
    }
    fn neighbors_of(&self, v: NodeId) -> Result<Vec<NodeId>> {
        Ok(self.neighbors(v).to_vec())
    }
}

impl<S: AdjacencySource + ?Sized> AdjacencySource for &S {
    fn node_count(&self) -> usize {
        (**self).node_count()
    }
    fn neighbors_of(&self, v: NodeId) -> Result<Vec<NodeId>> {
        (**self).neighbors_of(v)
    }
}

impl<S: AdjacencySource + ?Sized> AdjacencySource for Arc<S> {
    fn node_count(&self) -> usize {
        (**self).node_count()
    }
    fn neighbors_of(&self, v: NodeId) -> Result<Vec<NodeId>> {
        (**self).neighbors_of(v)
    }
}

/// Incremental topology access.
///
/// The node universe `0..n` is known up front, edges are not: they are only
/// revealed by [`neighbors`](Self::neighbors) queries. The oracle records
/// which nodes have had their adjacency revealed and counts every query,
/// including repeats served from its cache.
pub struct GraphOracle<S> {
    source: S,
    n: usize,
    revealed: HashMap<NodeId, Arc<[NodeId]>>,
    queries: u64,
}

impl<S: AdjacencySource> GraphOracle<S> {
    pub fn new(source: S) -> Self {
        let n = source.node_count();
        Self { source, n, revealed: HashMap::new(), queries: 0 }
    }

    /// Size of the node universe.
    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Sorted, duplicate-free neighbours of `v`.
    pub fn neighbors(&mut self, v: NodeId) -> Result<Arc<[NodeId]>> {
        if v.index() >= self.n {
            return Err(Error::Input(format!("node {v} outside universe of {} nodes", self.n)));
        }
        self.queries += 1;
        if let Some(nb) = self.revealed.get(&v) {
            return Ok(Arc::clone(nb));
        }
        let mut nb = self.source.neighbors_of(v)?;
        nb.sort_unstable();
        nb.dedup();
        nb.retain(|&w| w != v);
        if let Some(bad) = nb.iter().find(|w| w.index() >= self.n) {
            return Err(Error::Graph(format!("source returned neighbour {bad} outside universe")));
        }
        let nb: Arc<[NodeId]> = nb.into();
        self.revealed.insert(v, Arc::clone(&nb));
        Ok(nb)
    }

    /// Uniform draw from the node universe; touches no topology.
    pub fn sample_node<R: Rng + ?Sized>(&self, rng: &mut R) -> NodeId {
        NodeId::from(rng.random_range(0..self.n))
    }

    pub fn is_revealed(&self, v: NodeId) -> bool {
        self.revealed.contains_key(&v)
    }

    /// Number of distinct nodes whose adjacency has been revealed.
    pub fn revealed_count(&self) -> usize {
        self.revealed.len()
    }

    /// Total number of neighbour queries, repeats included.
    pub fn query_count(&self) -> u64 {
        self.queries
    }

    pub fn source(&self) -> &S {
        &self.source
    }
}
