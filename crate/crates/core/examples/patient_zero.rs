//! Finds the earliest-infected node of a simulated SIR outbreak on a
//! small-world graph.

use graph_bo::baselines::{search, SearchMethod, SearcherConfig};
use graph_bo::engine::{run, BoConfig};
use graph_bo::graph::{gen_ws, GraphOracle};
use graph_bo::spectral::KernelFamily;
use graph_bo::tasks::{patient_zero_values, sir_simulate, Direction, SirParams, TabulatedObjective};

fn main() -> graph_bo::Result<()> {
    let g = gen_ws(500, 10, 0.2, 4)?;
    let sir = SirParams { beta: 0.2, gamma: 0.015, epsilon: 0.0, horizon: 20, initial_fraction: 0.003, seed: 9 };
    let tau = sir_simulate(&g, &sir)?;
    let values = patient_zero_values(&tau, sir.horizon);
    let infected = tau.iter().filter(|t| t.is_some()).count();
    println!("outbreak reached {infected} of {} nodes in {} steps", g.node_count(), sir.horizon);

    let obj = TabulatedObjective::new(values, Direction::Maximize)?;
    let budget = 80;
    let mut oracle = GraphOracle::new(&g);
    let bo =
        run(&mut oracle, &obj, &BoConfig { budget, kernel: KernelFamily::Diffusion, seed: 1, ..Default::default() })?;
    println!(
        "bo-diffusion best {} value {:.4} (infected at t = {:?})",
        bo.best_node,
        bo.best_value,
        tau[bo.best_node.index()]
    );
    for method in [SearchMethod::Random, SearchMethod::Local] {
        let mut oracle = GraphOracle::new(&g);
        let res = search(&mut oracle, &obj, &SearcherConfig::new(method, budget, 1))?;
        println!("{:<12} best {} value {:.4}", method.as_str(), res.best_node, res.best_value);
    }
    Ok(())
}
