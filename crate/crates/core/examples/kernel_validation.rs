//! Recovers a smooth Laplacian eigenvector from half of its entries with each
//! kernel family and reports held-out Spearman correlation.

use std::path::Path;

use graph_bo::harness::{kernel_validation, GraphSpec, KernelValidationConfig, Seeds};

fn main() -> graph_bo::Result<()> {
    let mut cfg = KernelValidationConfig::new(GraphSpec::Ba { n: 200, m: 1, seed: 0 });
    cfg.seeds = Seeds::Count(3);
    for noise in [0.0, 0.05] {
        cfg.noise_sd = noise;
        let report = kernel_validation(&cfg, Path::new("."))?;
        println!("noise sd {noise}: {} nodes, {} training", report.nodes, report.train_size);
        for f in &report.families {
            let rho: Vec<String> = f.rho.iter().map(|r| r.map_or("-".into(), |v| format!("{v:.3}"))).collect();
            println!(
                "  {:<14} median rho {:.3}  per seed [{}]",
                f.family.as_str(),
                f.median_rho.unwrap_or(f64::NAN),
                rho.join(", ")
            );
        }
    }
    Ok(())
}
