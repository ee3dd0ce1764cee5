//! Minimises the Ackley and Rosenbrock functions sampled on a grid graph,
//! comparing kernel families.

use graph_bo::engine::{run, BoConfig};
use graph_bo::graph::{gen_grid2d, GraphOracle};
use graph_bo::spectral::KernelFamily;
use graph_bo::tasks::{ackley, grid_function_values, rosenbrock, Direction, GridBox, TabulatedObjective};

fn main() -> graph_bo::Result<()> {
    let (g, grid) = gen_grid2d(31)?;
    type TestFn = fn(f64, f64) -> f64;
    let tasks: [(&str, GridBox, TestFn); 2] =
        [("ackley", GridBox::ACKLEY, ackley), ("rosenbrock", GridBox::ROSENBROCK, rosenbrock)];
    for (name, domain, f) in tasks {
        let obj =
            TabulatedObjective::new(grid_function_values(grid, domain, f)?, Direction::Minimize)?.with_noise(0.05);
        for kernel in [KernelFamily::Diffusion, KernelFamily::SumInverse, KernelFamily::Matern] {
            let mut oracle = GraphOracle::new(&g);
            let res = run(&mut oracle, &obj, &BoConfig { budget: 60, kernel, seed: 3, ..Default::default() })?;
            let (r, c) = grid.coord(res.best_node);
            println!(
                "{name:<10} {:<12} best observed {:>8.4} at ({:.2}, {:.2}), regret {:.4}",
                kernel.as_str(),
                res.best_value,
                domain.map(r, grid.side),
                domain.map(c, grid.side),
                res.records.last().and_then(|x| x.regret).unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
