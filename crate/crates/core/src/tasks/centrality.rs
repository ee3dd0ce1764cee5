use std::collections::VecDeque;

use crate::graph::AdjacencyGraph;
use crate::{Error, Result};

const POWER_TOL: f64 = 1e-10;
const POWER_MAX_ITER: usize = 100_000;

pub fn degree_values(g: &AdjacencyGraph) -> Vec<f64> {
    g.nodes().map(|v| g.degree(v) as f64).collect()
}

/// Unnormalised betweenness over unordered `{s, t}` pairs (Brandes).
pub fn betweenness(g: &AdjacencyGraph) -> Vec<f64> {
    let n = g.node_count();
    let mut cb = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    for s in 0..n {
        sigma.fill(0.0);
        dist.fill(usize::MAX);
        delta.fill(0.0);
        order.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for w in g.neighbors(u.into()) {
                let w = w.index();
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[u] + 1 {
                    sigma[w] += sigma[u];
                }
            }
        }
        for &w in order.iter().rev() {
            for u in g.neighbors(w.into()) {
                let u = u.index();
                if dist[u] != usize::MAX && dist[u] + 1 == dist[w] {
                    delta[u] += sigma[u] / sigma[w] * (1.0 + delta[w]);
                }
            }
            if w != s {
                cb[w] += delta[w];
            }
        }
    }
    // each unordered pair was counted from both endpoints
    cb.iter_mut().for_each(|c| *c *= 0.5);
    cb
}

/// Dominant eigenvector of the adjacency matrix, nonnegative with unit norm.
///
/// Iterates on `A + I`, which has the same eigenvectors but a strictly
/// dominant top eigenvalue even on bipartite graphs.
pub fn eigenvector_centrality(g: &AdjacencyGraph) -> Result<Vec<f64>> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::Graph("eigenvector centrality of an empty graph".into()));
    }
    if !g.is_connected() {
        return Err(Error::Graph("eigenvector centrality needs a connected graph".into()));
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut next = vec![0.0; n];
    for _ in 0..POWER_MAX_ITER {
        for v in 0..n {
            next[v] = x[v] + g.neighbors(v.into()).iter().map(|w| x[w.index()]).sum::<f64>();
        }
        let norm = next.iter().map(|a| a * a).sum::<f64>().sqrt();
        next.iter_mut().for_each(|a| *a /= norm);
        let diff = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut x, &mut next);
        if diff < POWER_TOL {
            return Ok(x);
        }
    }
    Err(Error::Numerical(format!("power iteration did not converge in {POWER_MAX_ITER} iterations")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_graphs::*;
    use crate::graph::{gen_ba, gen_ws};
    use approx::assert_relative_eq;
    use nalgebra::{DMatrix, SymmetricEigen};
    use rand::{Rng, SeedableRng};

    /// Oracle: enumerate every shortest path explicitly.
    fn betweenness_brute(g: &AdjacencyGraph) -> Vec<f64> {
        let n = g.node_count();
        let mut out = vec![0.0; n];
        for s in 0..n {
            let ds = g.bfs_distances(s.into());
            for t in (s + 1)..n {
                let Some(d) = ds[t] else { continue };
                let mut paths = Vec::new();
                let mut stack = vec![vec![s]];
                while let Some(p) = stack.pop() {
                    let last = *p.last().unwrap();
                    if last == t {
                        paths.push(p);
                        continue;
                    }
                    for w in g.neighbors(last.into()) {
                        if ds[w.index()] == Some(p.len()) && p.len() <= d {
                            let mut q = p.clone();
                            q.push(w.index());
                            stack.push(q);
                        }
                    }
                }
                let total = paths.len() as f64;
                for v in 0..n {
                    if v != s && v != t {
                        let through = paths.iter().filter(|p| p.contains(&v)).count() as f64;
                        out[v] += through / total;
                    }
                }
            }
        }
        out
    }

    fn random_graph(rng: &mut impl Rng) -> AdjacencyGraph {
        let n = rng.random_range(2..=12);
        let p = rng.random_range(0.15..0.7);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.random_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        AdjacencyGraph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn betweenness_small_cases() {
        assert_eq!(betweenness(&path(3)), vec![0.0, 1.0, 0.0]);
        let l = 7.0;
        let b = betweenness(&star(7));
        assert_eq!(b[0], l * (l - 1.0) / 2.0);
        assert_eq!(betweenness_brute(&star(7))[0], 21.0);
        assert!(betweenness(&complete(6)).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn betweenness_matches_enumeration_on_random_graphs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..50 {
            let g = random_graph(&mut rng);
            let fast = betweenness(&g);
            let slow = betweenness_brute(&g);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() <= 1e-9, "{fast:?} vs {slow:?}");
            }
        }
    }

    fn dense_dominant(g: &AdjacencyGraph) -> Vec<f64> {
        let n = g.node_count();
        let mut a = DMatrix::zeros(n, n);
        for (u, v) in g.edges() {
            a[(u.index(), v.index())] = 1.0;
            a[(v.index(), u.index())] = 1.0;
        }
        let eig = SymmetricEigen::new(a);
        let top = eig.eigenvalues.iter().enumerate().fold(0, |b, (i, &l)| if l > eig.eigenvalues[b] { i } else { b });
        let col = eig.eigenvectors.column(top);
        let sign = if col.sum() < 0.0 { -1.0 } else { 1.0 };
        col.iter().map(|x| sign * x).collect()
    }

    #[test]
    fn eigenvector_matches_dense_solve() {
        let graphs = vec![
            star(9),
            cycle(11),
            complete(5),
            path(7),
            gen_ba(50, 1, 3).unwrap(),
            gen_ba(50, 3, 4).unwrap(),
            gen_ws(40, 4, 0.3, 5).unwrap(),
        ];
        for g in graphs {
            let x = eigenvector_centrality(&g).unwrap();
            let y = dense_dominant(&g);
            for (a, b) in x.iter().zip(&y) {
                assert!((a - b).abs() < 1e-6, "{a} vs {b}");
            }
            assert!(x.iter().all(|&a| a >= 0.0));
            assert_relative_eq!(x.iter().map(|a| a * a).sum::<f64>(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn star_center_leaf_ratio() {
        let x = eigenvector_centrality(&star(16)).unwrap();
        assert_relative_eq!(x[0] / x[1], 4.0, epsilon = 1e-7);
        let c = eigenvector_centrality(&cycle(8)).unwrap();
        assert!(c.iter().all(|&a| (a - c[0]).abs() < 1e-9));
    }

    #[test]
    fn eigenvector_rejects_disconnected() {
        assert!(eigenvector_centrality(&AdjacencyGraph::empty(3)).is_err());
        assert!(eigenvector_centrality(&AdjacencyGraph::empty(0)).is_err());
    }
}
