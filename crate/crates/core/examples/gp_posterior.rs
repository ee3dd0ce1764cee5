//! Fits a spectral-kernel GP on an ego-network and scores candidates by
//! expected improvement, i.e. one step of the optimiser done by hand.

use std::collections::HashSet;

use graph_bo::acquisition::select_next;
use graph_bo::gp::{fit, FitConfig, TrainSet};
use graph_bo::graph::{ego_subgraph, gen_ba, GraphOracle};
use graph_bo::spectral::KernelFamily;
use graph_bo::tasks::degree_values;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> graph_bo::Result<()> {
    let g = gen_ba(500, 2, 1)?;
    let degree = degree_values(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut oracle = GraphOracle::new(&g);
    let center = oracle.sample_node(&mut rng);
    let ego = ego_subgraph(&mut oracle, center, 40, &mut rng)?;
    println!("ego-net of {} nodes around {center}, {} adjacency queries", ego.len(), oracle.query_count());

    // observe every third ego-net node; minimise negative degree
    let idx: Vec<usize> = (0..ego.len()).step_by(3).collect();
    let y: Vec<f64> = idx.iter().map(|&i| -degree[ego.global(i).index()]).collect();
    let visited: HashSet<_> = idx.iter().map(|&i| ego.global(i)).collect();
    let train = TrainSet::new(idx.clone(), y.clone())?;

    for family in KernelFamily::ALL {
        let model = fit(&ego, &train, family, &FitConfig::default(), &mut rng)?;
        let y_star = y.iter().copied().fold(f64::INFINITY, f64::min);
        let pick = select_next(&model, &ego, &visited, y_star)?.expect("unvisited nodes remain");
        let best_ei = pick.scores.iter().map(|s| s.1).fold(0.0, f64::max);
        println!(
            "{:<14} lml={:>8.3} noise={:.2e} next={} (degree {}) EI={best_ei:.3}",
            family.as_str(),
            model.log_marginal_likelihood(),
            model.noise(),
            pick.chosen,
            degree[pick.chosen.index()]
        );
    }
    Ok(())
}
