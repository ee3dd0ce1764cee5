//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use graph_bo::engine::TrustRegionConfig;
use graph_bo::{AdjacencyGraph, EgoNet, NodeId};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

/// Erdős–Rényi G(n, p).
pub fn erdos_renyi<R: Rng>(n: usize, p: f64, rng: &mut R) -> AdjacencyGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    AdjacencyGraph::from_edges(n, edges).unwrap()
}

/// A random connected graph: a random spanning tree plus extra G(n, p) edges.
pub fn random_connected<R: Rng>(n: usize, p: f64, rng: &mut R) -> AdjacencyGraph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.random_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    AdjacencyGraph::from_edges(n, edges).unwrap()
}

pub fn adjacency_matrix(g: &AdjacencyGraph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut a = DMatrix::zeros(n, n);
    for (u, v) in g.edges() {
        a[(u.index(), v.index())] = 1.0;
        a[(v.index(), u.index())] = 1.0;
    }
    a
}

/// Scaled normalised Laplacian assembled entry by entry.
pub fn laplacian_oracle(g: &AdjacencyGraph) -> DMatrix<f64> {
    let n = g.node_count();
    let a = adjacency_matrix(g);
    let d: Vec<f64> = (0..n).map(|i| a.row(i).sum()).collect();
    DMatrix::from_fn(n, n, |i, j| {
        let norm = if d[i] > 0.0 && d[j] > 0.0 { a[(i, j)] / (d[i] * d[j]).sqrt() } else { 0.0 };
        0.5 * (if i == j { 1.0 } else { 0.0 } - norm)
    })
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Betweenness by enumerating every shortest path of every unordered pair.
pub fn betweenness_brute(g: &AdjacencyGraph) -> Vec<f64> {
    let n = g.node_count();
    let mut out = vec![0.0; n];
    for s in 0..n {
        let dist = g.bfs_distances(NodeId::from(s));
        for t in s + 1..n {
            let Some(d) = dist[t] else { continue };
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![vec![s]];
            while let Some(p) = stack.pop() {
                let last = *p.last().unwrap();
                if last == t {
                    paths.push(p);
                    continue;
                }
                if p.len() > d {
                    continue;
                }
                for w in g.neighbors(NodeId::from(last)) {
                    if dist[w.index()] == Some(p.len()) {
                        let mut q = p.clone();
                        q.push(w.index());
                        stack.push(q);
                    }
                }
            }
            let total = paths.len() as f64;
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    out[v] += 1.0 / total;
                }
            }
        }
    }
    out
}

/// Dominant adjacency eigenvector (nonnegative, unit norm) via dense solve.
pub fn eigenvector_dense(g: &AdjacencyGraph) -> Vec<f64> {
    let eig = SymmetricEigen::new(adjacency_matrix(g));
    let (k, _) =
        eig.eigenvalues.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
    let mut x: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
    if x.iter().sum::<f64>() < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    x
}

/// Checks an ego-net against BFS layers on the full graph: every layer
/// before the boundary is complete, the boundary layer contributes exactly
/// the remaining slots, and the local adjacency is the induced subgraph.
pub fn check_egonet(g: &AdjacencyGraph, center: NodeId, q: usize, ego: &EgoNet) -> Result<(), String> {
    let n = g.node_count();
    let mut hop = vec![usize::MAX; n];
    let mut layers: Vec<Vec<usize>> = vec![vec![center.index()]];
    hop[center.index()] = 0;
    let mut queue = VecDeque::from([center.index()]);
    while let Some(u) = queue.pop_front() {
        for w in g.neighbors(NodeId::from(u)) {
            if hop[w.index()] == usize::MAX {
                hop[w.index()] = hop[u] + 1;
                if layers.len() <= hop[w.index()] {
                    layers.push(Vec::new());
                }
                layers[hop[w.index()]].push(w.index());
                queue.push_back(w.index());
            }
        }
    }
    let component: usize = layers.iter().map(Vec::len).sum();
    let want = q.min(component);
    if ego.len() != want {
        return Err(format!("size {} != {want}", ego.len()));
    }
    if ego.global(0) != center {
        return Err("local 0 is not the center".into());
    }
    let got: BTreeSet<usize> = ego.nodes().iter().map(|v| v.index()).collect();
    if got.len() != ego.len() {
        return Err("duplicate nodes".into());
    }
    let mut taken = 0;
    for layer in &layers {
        let in_ego = layer.iter().filter(|v| got.contains(v)).count();
        if taken + layer.len() <= want {
            if in_ego != layer.len() {
                return Err(format!("complete layer has only {in_ego}/{} nodes", layer.len()));
            }
            taken += layer.len();
        } else {
            if in_ego != want - taken {
                return Err(format!("boundary layer has {in_ego}, expected {}", want - taken));
            }
            taken = want;
        }
    }
    for (i, &v) in ego.nodes().iter().enumerate() {
        if ego.hops()[i] != hop[v.index()] {
            return Err(format!("hop of {v:?} mislabelled"));
        }
    }
    let a = ego.adjacency();
    for i in 0..ego.len() {
        for j in 0..ego.len() {
            if i != j && a.has_edge(NodeId::from(i), NodeId::from(j)) != g.has_edge(ego.global(i), ego.global(j)) {
                return Err(format!("edge ({i},{j}) differs from the induced subgraph"));
            }
        }
    }
    Ok(())
}

/// Step-by-step trust-region recomputation: returns `(Q, restart)` after
/// every outcome.
pub fn trust_region_trajectory(c: &TrustRegionConfig, n: usize, outcomes: &[bool]) -> Vec<(usize, bool)> {
    let cap = c.q_max.unwrap_or(n).min(n).max(c.q_min);
    let mut q = c.q0.min(cap) as f64;
    let (mut s, mut f) = (0usize, 0usize);
    let mut out = Vec::new();
    for &ok in outcomes {
        if ok {
            s += 1;
            f = 0;
            if s == c.succ_tol {
                q = (c.gamma * q).round().min(cap as f64);
                s = 0;
            }
        } else {
            f += 1;
            s = 0;
            if f == c.fail_tol {
                q = (q / c.gamma).round().max(c.q_min as f64);
                f = 0;
            }
        }
        out.push((q as usize, q as usize <= c.q_min));
    }
    out
}
