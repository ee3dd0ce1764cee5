//! Runs two small experiment configs through the harness and aggregates
//! method ranks across both tasks.

use graph_bo::harness::{rank_results_dir, run_experiment, write_rank_report, ExperimentConfig, RunOptions};

const ACKLEY: &str = r#"
name = "ackley"
budget = 30
seeds = 2
methods = ["bo-sum_inverse", "random", "local"]
graph = { kind = "grid", side = 15 }
task = { kind = "ackley", noise_sd = 0.05 }
"#;

const DEGREE: &str = r#"
name = "degree"
budget = 30
seeds = 2
methods = ["bo-sum_inverse", "random", "local"]
graph = { kind = "ba", n = 300, m = 2, seed = 1 }
task = { kind = "degree" }
"#;

fn main() -> graph_bo::Result<()> {
    let root = std::env::temp_dir().join("graph-bo-rank-example");
    for text in [ACKLEY, DEGREE] {
        let cfg = ExperimentConfig::from_toml(text)?;
        let opts = RunOptions { out_dir: Some(root.join(&cfg.name)), ..Default::default() };
        let outcome = run_experiment(&cfg, &opts)?;
        println!("ran {} ({} cells)", cfg.name, outcome.cells.len());
    }
    let report = rank_results_dir(&root)?;
    write_rank_report(&root, &report)?;
    for (method, ranks) in &report.ranks {
        println!("{method:<16} mean rank at T=1: {:.2}, at T={}: {:.2}", ranks[0], ranks.len(), ranks[ranks.len() - 1]);
    }
    println!("wrote {}", root.join("ranks.csv").display());
    Ok(())
}
