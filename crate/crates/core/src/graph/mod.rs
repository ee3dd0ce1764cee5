//! Undirected, unweighted graphs and incremental access to them.

mod ego;
mod generators;
mod io;
mod oracle;

use std::collections::VecDeque;
use std::fmt;

use crate::{Error, Result};

pub use ego::{ego_subgraph, EgoNet};
pub use generators::{gen_ba, gen_grid2d, gen_ws, Grid2d};
pub use io::{load_edge_list, load_edge_list_file};
pub use oracle::{AdjacencySource, GraphOracle};

/// Index of a node in a node universe of known size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(u32::try_from(i).expect("node index exceeds u32"))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Symmetric adjacency lists. Every list is sorted and duplicate-free, and no
/// node is its own neighbour.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyGraph {
    adj: Vec<Vec<NodeId>>,
}

impl AdjacencyGraph {
    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n] }
    }

    /// Builds a graph from an edge iterator. Self-loops are dropped and
    /// repeated edges (in either orientation) collapse to one.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Input(format!("edge ({u}, {v}) out of range for {n} nodes")));
            }
            if u == v {
                continue;
            }
            adj[u].push(NodeId::from(v));
            adj[v].push(NodeId::from(u));
        }
        Ok(Self::from_raw_lists(adj))
    }

    /// Sorts and deduplicates raw (already symmetric) neighbour lists.
    pub(crate) fn from_raw_lists(mut adj: Vec<Vec<NodeId>>) -> Self {
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Self { adj }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Sorted neighbours of `v`. Panics if `v` is out of range.
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v.index()]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v.index()].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adj[u.index()].binary_search(&v).is_ok()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.adj.len()).map(NodeId::from)
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            let u = NodeId::from(u);
            list.iter().copied().filter(move |&v| u < v).map(move |v| (u, v))
        })
    }

    /// Hop distances from `source`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, source: NodeId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        dist[source.index()] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = dist[u.index()].unwrap_or(0);
            for &w in self.neighbors(u) {
                if dist[w.index()].is_none() {
                    dist[w.index()] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() == 0 || self.bfs_distances(NodeId(0)).iter().all(Option::is_some)
    }
}

/// Largest eccentricity, by breadth-first search from every node.
pub fn diameter(g: &AdjacencyGraph) -> Result<usize> {
    let mut best = 0;
    for s in g.nodes() {
        for d in g.bfs_distances(s) {
            match d {
                Some(d) => best = best.max(d),
                None => return Err(Error::Graph("diameter of a disconnected graph".into())),
            }
        }
    }
    Ok(best)
}
