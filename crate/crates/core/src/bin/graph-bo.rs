use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use graph_bo::harness::{
    kernel_validation, rank_results_dir, run_experiment, write_rank_report, ExperimentConfig, KernelValidationConfig,
    RunOptions,
};
use graph_bo::Result;

#[derive(Parser)]
#[command(name = "graph-bo", version, about = "Bayesian optimisation on graphs: experiments and diagnostics")]
struct Cli {
    /// Override the master seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides the config's output_dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Maximum number of concurrent cells.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (method, seed) cell of an experiment config.
    Run { config: PathBuf },
    /// Fit each kernel family to a Laplacian eigenvector and report held-out rank correlation.
    ValidateKernels { config: PathBuf },
    /// Aggregate method ranks over every summary.json below a directory.
    Rank { results_dir: PathBuf },
}

fn parent_dir(p: &Path) -> PathBuf {
    p.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn main_inner(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let opts =
                RunOptions { out_dir: cli.out, jobs: cli.jobs, base_dir: parent_dir(&config), master_seed: cli.seed };
            let outcome = run_experiment(&cfg, &opts)?;
            for m in &outcome.summary.methods {
                let fr = m.final_regret_mean.map_or("n/a".to_string(), |v| format!("{v:.6}"));
                println!(
                    "{:<20} ok={:<3} failed={:<3} mean final regret={fr}",
                    m.method,
                    m.seeds.len(),
                    m.failures.len()
                );
            }
            match &outcome.out_dir {
                Some(d) => println!("wrote {}", d.display()),
                None => println!("no output directory configured; nothing written"),
            }
        }
        Command::ValidateKernels { config } => {
            let mut cfg = KernelValidationConfig::load(&config)?;
            if let Some(s) = cli.seed {
                cfg.master_seed = s;
            }
            let base = parent_dir(&config);
            if let Some(out) = cli.out {
                cfg.output_dir = Some(std::env::current_dir()?.join(out));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cli.jobs.unwrap_or(0))
                .build()
                .map_err(|e| graph_bo::Error::Config(format!("thread pool: {e}")))?;
            let report = pool.install(|| kernel_validation(&cfg, &base))?;
            for f in &report.families {
                let med = f.median_rho.map_or("n/a".to_string(), |v| format!("{v:.4}"));
                println!("{:<14} median rho={med}", f.family.as_str());
            }
            if let Some(d) = &cfg.output_dir {
                println!("wrote {}", base.join(d).display());
            }
        }
        Command::Rank { results_dir } => {
            let report = rank_results_dir(&results_dir)?;
            let out = cli.out.unwrap_or_else(|| results_dir.clone());
            write_rank_report(&out, &report)?;
            for (m, r) in &report.ranks {
                println!("{m:<20} final mean rank={:.3}", r.last().copied().unwrap_or(f64::NAN));
            }
            println!("wrote {} and {}", out.join("ranks.json").display(), out.join("ranks.csv").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
