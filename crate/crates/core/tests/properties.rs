//! Invariants checked on randomly generated inputs.

mod common;

use std::collections::HashSet;

use common::*;
use graph_bo::acquisition::expected_improvement;
use graph_bo::engine::{tr_update, TrustRegionConfig, TrustRegionState};
use graph_bo::gp::{GpModel, TrainSet};
use graph_bo::graph::{ego_subgraph, GraphOracle};
use graph_bo::harness::{average_ranks, spearman_rho};
use graph_bo::spectral::{kernel_matrix, scaled_laplacian, KernelFamily, KernelSpec};
use graph_bo::tasks::betweenness;
use graph_bo::{AdjacencyGraph, NodeId};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn graph(n: usize, p: f64, seed: u64) -> AdjacencyGraph {
    erdos_renyi(n, p, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Non-negative hyperparameters with occasional exact zeros; Matérn β > 0.
fn random_spec(family: KernelFamily, n: usize, rng: &mut ChaCha8Rng) -> KernelSpec {
    let mut b = || if rng.random::<f64>() < 0.1 { 0.0 } else { rng.random_range(0.0..4.0) };
    let spec = match family {
        KernelFamily::Diffusion => KernelSpec::diffusion(b()),
        KernelFamily::DiffusionArd => KernelSpec::diffusion_ard((0..n).map(|_| b()).collect()),
        KernelFamily::Polynomial => KernelSpec::polynomial((0..3).map(|_| b()).collect()),
        KernelFamily::SumInverse => KernelSpec::sum_inverse((0..4).map(|_| b()).collect()),
        KernelFamily::Matern => {
            let nu = [0.5, 1.5, 2.5][rng.random_range(0..3)];
            KernelSpec::matern(rng.random_range(0.01..4.0), nu)
        }
    };
    spec.with_output_scale(rng.random_range(0.1..3.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laplacian_matches_entrywise_oracle(n in 1usize..25, p in 0.0f64..0.5, seed: u64) {
        let g = graph(n, p, seed);
        let lap = scaled_laplacian(&g);
        let oracle = laplacian_oracle(&g);
        prop_assert!((lap.matrix() - &oracle).amax() < 1e-12);
        for &l in lap.eigenvalues().iter() {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&l));
        }
    }

    #[test]
    fn kernels_are_symmetric_psd(n in 1usize..25, p in 0.0f64..0.5, seed: u64) {
        let g = graph(n, p, seed);
        let lap = scaled_laplacian(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for family in KernelFamily::ALL {
            let spec = random_spec(family, n, &mut rng);
            let k = kernel_matrix(&lap, &spec).unwrap();
            let scale = k.amax().max(1.0);
            prop_assert!((&k - k.transpose()).amax() <= 1e-12 * scale);
            let m = min_eigenvalue(&k);
            prop_assert!(m >= -1e-9 * scale, "{family}: min eigenvalue {m}");
        }
    }

    #[test]
    fn egonet_is_bfs_prefix(n in 2usize..80, p in 0.01f64..0.3, seed: u64, q in 1usize..90) {
        let g = graph(n, p, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let center = NodeId::from(rng.random_range(0..n));
        let mut oracle = GraphOracle::new(&g);
        let ego = ego_subgraph(&mut oracle, center, q, &mut rng).unwrap();
        prop_assert_eq!(check_egonet(&g, center, q, &ego), Ok(()));
        // queries never exceed returned nodes plus the outermost layer
        let outer = ego.hops().iter().max().copied().unwrap_or(0);
        let boundary = ego.hops().iter().filter(|&&h| h == outer).count();
        prop_assert!(oracle.query_count() as usize <= ego.len() + boundary);
    }

    #[test]
    fn betweenness_matches_path_enumeration(n in 1usize..11, p in 0.1f64..0.7, seed: u64) {
        let g = graph(n, p, seed);
        let fast = betweenness(&g);
        let slow = betweenness_brute(&g);
        for (a, b) in fast.iter().zip(&slow) {
            prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn trust_region_follows_recurrence(
        q0 in 1usize..200,
        gamma in 1.05f64..3.0,
        succ in 1usize..6,
        fail in 1usize..12,
        outcomes in proptest::collection::vec(any::<bool>(), 1..200),
    ) {
        let config = TrustRegionConfig { q0, gamma, succ_tol: succ, fail_tol: fail, q_min: 1, q_max: None };
        let n = 500;
        let expected = trust_region_trajectory(&config, n, &outcomes);
        let mut s = TrustRegionState::new(config, n);
        for (ok, (q, restart)) in outcomes.iter().zip(expected) {
            s = tr_update(s, *ok);
            prop_assert_eq!((s.q, s.restart), (q, restart));
        }
    }

    #[test]
    fn posterior_is_exchangeable(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_connected(15, 0.15, &mut rng);
        let lap = Arc::new(scaled_laplacian(&g));
        let mut idx: Vec<usize> = (0..15).filter(|_| rng.random::<f64>() < 0.5).collect();
        if idx.is_empty() {
            idx.push(0);
        }
        let y: Vec<f64> = idx.iter().map(|_| rng.random_range(-3.0..3.0)).collect();
        let spec = KernelSpec::diffusion(rng.random_range(0.1..3.0)).with_output_scale(1.5);
        let a = GpModel::with_hyperparameters(lap.clone(), TrainSet::new(idx.clone(), y.clone()).unwrap(), spec.clone(), 0.05).unwrap();
        let (ri, ry): (Vec<usize>, Vec<f64>) = idx.iter().copied().zip(y.iter().copied()).rev().unzip();
        let b = GpModel::with_hyperparameters(lap, TrainSet::new(ri, ry).unwrap(), spec, 0.05).unwrap();
        let q: Vec<usize> = (0..15).collect();
        let (ma, va) = a.predict(&q).unwrap();
        let (mb, vb) = b.predict(&q).unwrap();
        for i in 0..15 {
            prop_assert!((ma[i] - mb[i]).abs() <= 1e-10 * ma[i].abs().max(1.0));
            prop_assert!((va[i] - vb[i]).abs() <= 1e-10 * va[i].abs().max(1.0));
            prop_assert!(va[i] >= 0.0);
        }
    }

    #[test]
    fn expected_improvement_bounds(mu in -10.0f64..10.0, sigma in 0.0f64..5.0, y_star in -10.0f64..10.0) {
        let ei = expected_improvement(mu, sigma, y_star);
        prop_assert!(ei >= 0.0);
        prop_assert!(ei >= (y_star - mu).max(0.0) - 1e-12);
        prop_assert!(ei <= (y_star - mu).max(0.0) + sigma);
    }

    #[test]
    fn ranks_and_correlation(x in proptest::collection::vec(-5i32..5, 2..30)) {
        let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
        let r = average_ranks(&xf);
        let n = xf.len() as f64;
        prop_assert!((r.iter().sum::<f64>() - n * (n + 1.0) / 2.0).abs() < 1e-9);
        if x.iter().collect::<HashSet<_>>().len() > 1 {
            let rho = spearman_rho(&xf, &xf).unwrap();
            prop_assert!((rho - 1.0).abs() < 1e-12);
            let neg: Vec<f64> = xf.iter().map(|v| -v).collect();
            prop_assert!((spearman_rho(&xf, &neg).unwrap() + 1.0).abs() < 1e-12);
        }
    }
}
