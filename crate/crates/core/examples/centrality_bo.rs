//! Searches a Barabási–Albert graph for its most central node with the
//! spectral BO loop and with the four baselines.

use graph_bo::baselines::{search, SearchMethod, SearcherConfig};
use graph_bo::engine::{run, BoConfig};
use graph_bo::graph::{gen_ba, GraphOracle};
use graph_bo::tasks::{eigenvector_centrality, Direction, TabulatedObjective};

fn main() -> graph_bo::Result<()> {
    let g = gen_ba(1000, 3, 7)?;
    let obj = TabulatedObjective::new(eigenvector_centrality(&g)?, Direction::Maximize)?;
    let budget = 100;
    let seeds = 0..3u64;

    let mut bo = Vec::new();
    for seed in seeds.clone() {
        let mut oracle = GraphOracle::new(&g);
        let res = run(&mut oracle, &obj, &BoConfig { budget, seed, ..Default::default() })?;
        bo.push(res.records.last().and_then(|r| r.regret).unwrap_or(f64::NAN));
    }
    println!("{:<8} final regret per seed {:?}", "bo", rounded(&bo));

    for method in SearchMethod::ALL {
        let mut r = Vec::new();
        for seed in seeds.clone() {
            let mut oracle = GraphOracle::new(&g);
            let res = search(&mut oracle, &obj, &SearcherConfig::new(method, budget, seed))?;
            r.push(res.records.last().and_then(|x| x.regret).unwrap_or(f64::NAN));
        }
        println!("{:<8} final regret per seed {:?}", method.as_str(), rounded(&r));
    }
    Ok(())
}

fn rounded(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1e4).round() / 1e4).collect()
}
