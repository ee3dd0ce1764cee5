//! Loads a social network from an edge list and looks for the user with the
//! highest betweenness.

use graph_bo::engine::{run, BoConfig, TrustRegionConfig};
use graph_bo::graph::{load_edge_list_file, GraphOracle};
use graph_bo::tasks::{betweenness, Direction, TabulatedObjective};

fn main() -> graph_bo::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/data/karate.edges");
    let g = load_edge_list_file(path)?;
    let bc = betweenness(&g);
    let obj = TabulatedObjective::new(bc.clone(), Direction::Maximize)?;
    println!("{} users, {} ties; most central user(s): {:?}", g.node_count(), g.edge_count(), obj.optimal_nodes());

    let config = BoConfig {
        n0: 3,
        budget: 12,
        trust_region: TrustRegionConfig { q0: 10, ..Default::default() },
        seed: 2,
        ..Default::default()
    };
    let mut oracle = GraphOracle::new(&g);
    let res = run(&mut oracle, &obj, &config)?;
    for r in &res.records {
        println!(
            "{:>2} {:?} user {:>2} betweenness {:>7.2} incumbent {:>7.2}",
            r.iteration,
            r.kind,
            r.node.index(),
            r.observed,
            r.incumbent
        );
    }
    Ok(())
}
