//! Random and regular graph generators. Every generator is a pure function of
//! its parameters and seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AdjacencyGraph, NodeId};
use crate::{Error, Result};

/// Barabási–Albert preferential attachment.
///
/// The first `m` nodes form a clique. Each later node attaches to `m`
/// distinct existing nodes chosen with probability proportional to degree,
/// realised by sampling uniformly from a list holding one entry per edge
/// endpoint. When that list is empty (only possible for `m = 1` before the
/// first edge exists) the target is drawn uniformly.
pub fn gen_ba(n: usize, m: usize, seed: u64) -> Result<AdjacencyGraph> {
    if m < 1 {
        return Err(Error::Input("BA requires m >= 1".into()));
    }
    if n <= m {
        return Err(Error::Input(format!("BA requires n > m (n = {n}, m = {m})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut endpoints: Vec<u32> = Vec::with_capacity(2 * m * n);

    for i in 0..m {
        for j in i + 1..m {
            adj[i].push(NodeId::from(j));
            adj[j].push(NodeId::from(i));
            endpoints.push(i as u32);
            endpoints.push(j as u32);
        }
    }

    let mut targets: Vec<u32> = Vec::with_capacity(m);
    for new in m..n {
        targets.clear();
        while targets.len() < m {
            let t = if endpoints.is_empty() {
                rng.random_range(0..new) as u32
            } else {
                endpoints[rng.random_range(0..endpoints.len())]
            };
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            adj[new].push(NodeId(t));
            adj[t as usize].push(NodeId::from(new));
            endpoints.push(t);
            endpoints.push(new as u32);
        }
    }
    Ok(AdjacencyGraph::from_raw_lists(adj))
}

/// Watts–Strogatz small world: a ring lattice where every node links to its
/// `k / 2` nearest neighbours on each side, after which each node's
/// rightward edges are rewired with probability `beta` to a uniformly chosen
/// endpoint, avoiding self-loops and duplicate edges.
pub fn gen_ws(n: usize, k: usize, beta: f64, seed: u64) -> Result<AdjacencyGraph> {
    if !k.is_multiple_of(2) {
        return Err(Error::Input(format!("WS mean degree must be even, got {k}")));
    }
    if k >= n {
        return Err(Error::Input(format!("WS requires k < n (k = {k}, n = {n})")));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Input(format!("WS rewiring probability {beta} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = k / 2;
    let mut adj: Vec<Vec<u32>> = vec![Vec::with_capacity(k + 2); n];
    for i in 0..n {
        for j in 1..=half {
            let t = (i + j) % n;
            adj[i].push(t as u32);
            adj[t].push(i as u32);
        }
    }
    for i in 0..n {
        for j in 1..=half {
            let t = ((i + j) % n) as u32;
            // An earlier rewire may already have removed this lattice edge.
            if !adj[i].contains(&t) || rng.random::<f64>() >= beta {
                continue;
            }
            if adj[i].len() >= n - 1 {
                break;
            }
            let w = loop {
                let w = rng.random_range(0..n) as u32;
                if w as usize != i && !adj[i].contains(&w) {
                    break w;
                }
            };
            adj[i].retain(|&x| x != t);
            adj[t as usize].retain(|&x| x != i as u32);
            adj[i].push(w);
            adj[w as usize].push(i as u32);
        }
    }
    let lists = adj.into_iter().map(|l| l.into_iter().map(NodeId).collect()).collect();
    Ok(AdjacencyGraph::from_raw_lists(lists))
}

/// Row/column coordinates of a square lattice built by [`gen_grid2d`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid2d {
    pub side: usize,
}

impl Grid2d {
    pub fn coord(&self, v: NodeId) -> (usize, usize) {
        (v.index() / self.side, v.index() % self.side)
    }

    pub fn node(&self, row: usize, col: usize) -> NodeId {
        NodeId::from(row * self.side + col)
    }
}

/// Four-neighbour `side × side` lattice; node `(r, c)` has id `r * side + c`.
pub fn gen_grid2d(side: usize) -> Result<(AdjacencyGraph, Grid2d)> {
    if side < 1 {
        return Err(Error::Input("grid side must be at least 1".into()));
    }
    let idx = |r: usize, c: usize| r * side + c;
    let mut edges = Vec::with_capacity(2 * side * side);
    for r in 0..side {
        for c in 0..side {
            if c + 1 < side {
                edges.push((idx(r, c), idx(r, c + 1)));
            }
            if r + 1 < side {
                edges.push((idx(r, c), idx(r + 1, c)));
            }
        }
    }
    Ok((AdjacencyGraph::from_edges(side * side, edges)?, Grid2d { side }))
}
