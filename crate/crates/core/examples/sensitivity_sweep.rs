//! Sweeps the initial ego-net size and the number of random initial
//! evaluations on a noisy Rosenbrock grid.

use graph_bo::engine::{run, BoConfig, TrustRegionConfig};
use graph_bo::graph::{gen_grid2d, GraphOracle};
use graph_bo::harness::mean_stderr;
use graph_bo::tasks::{grid_function_values, rosenbrock, Direction, GridBox, TabulatedObjective};

fn main() -> graph_bo::Result<()> {
    let (g, grid) = gen_grid2d(61)?;
    let values = grid_function_values(grid, GridBox::ROSENBROCK, rosenbrock)?;
    let obj = TabulatedObjective::new(values, Direction::Minimize)?.with_noise(0.1);
    println!("{:>4} {:>4}  mean final regret ± se (6 seeds)", "q0", "n0");
    for q0 in [10, 30, 100] {
        for n0 in [5, 20] {
            let mut finals = Vec::new();
            for seed in 0..6 {
                let config = BoConfig {
                    n0,
                    budget: 40,
                    trust_region: TrustRegionConfig { q0, ..Default::default() },
                    seed,
                    ..Default::default()
                };
                let mut oracle = GraphOracle::new(&g);
                let res = run(&mut oracle, &obj, &config)?;
                finals.push(res.records.last().and_then(|r| r.regret).unwrap_or(f64::NAN));
            }
            let (m, se) = mean_stderr(&finals);
            println!("{q0:>4} {n0:>4}  {m:.4} ± {:.4}", se.unwrap_or(0.0));
        }
    }
    Ok(())
}
