//! Runs the optimiser on small-world graphs of growing size with the ego-net
//! capped at 100 nodes: per-iteration time stays flat and only a small part
//! of the graph is ever revealed.

use graph_bo::engine::{run, BoConfig, StepKind, TrustRegionConfig};
use graph_bo::graph::{gen_ws, GraphOracle};
use graph_bo::harness::median;
use graph_bo::tasks::{Direction, TabulatedObjective};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> graph_bo::Result<()> {
    for n in [2_000, 20_000, 100_000] {
        let g = gen_ws(n, 10, 0.2, 1)?;
        let mut vr = ChaCha8Rng::seed_from_u64(2);
        let obj = TabulatedObjective::new((0..n).map(|_| vr.random::<f64>()).collect(), Direction::Minimize)?;
        let (mut t, mut revealed) = (Vec::new(), 0);
        for seed in 0..3 {
            let config = BoConfig {
                budget: 60,
                trust_region: TrustRegionConfig { q0: 100, q_max: Some(100), ..Default::default() },
                seed,
                ..Default::default()
            };
            let mut oracle = GraphOracle::new(&g);
            let res = run(&mut oracle, &obj, &config)?;
            t.extend(res.records.iter().filter(|r| r.kind == StepKind::Acquisition).map(|r| r.wall_ms));
            revealed = revealed.max(res.revealed_nodes);
        }
        println!(
            "n={n:>6}: median iteration {:.2} ms over 3 runs, at most {revealed} nodes revealed ({:.2}%)",
            median(&t),
            100.0 * revealed as f64 / n as f64
        );
    }
    Ok(())
}
