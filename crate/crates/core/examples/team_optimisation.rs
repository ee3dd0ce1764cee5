//! Builds a graph of candidate teams linked by member overlap and searches
//! for the team with the most diverse skill mix.

use graph_bo::engine::{run, BoConfig};
use graph_bo::graph::GraphOracle;
use graph_bo::tasks::{team_generate, Objective, TeamConfig};

fn main() -> graph_bo::Result<()> {
    let inst = team_generate(&TeamConfig::new(4, 0.1, 5))?;
    let obj = inst.objective();
    println!(
        "{} teams, {} overlap edges (Jaccard > {}), best achievable {:.4}",
        inst.graph.node_count(),
        inst.graph.edge_count(),
        inst.threshold,
        obj.optimum().unwrap_or(f64::NAN)
    );
    let mut oracle = GraphOracle::new(&inst.graph);
    let res = run(&mut oracle, &obj, &BoConfig { budget: 60, seed: 0, ..Default::default() })?;
    let team = &inst.teams[res.best_node.index()];
    println!("best found: team {} with members {team:?}, objective {:.4}", res.best_node, res.best_value);
    for &m in team {
        let s: Vec<String> = inst.skills[m].iter().map(|p| format!("{p:.2}")).collect();
        println!("  member {m:>2} skills [{}]", s.join(", "));
    }
    Ok(())
}
