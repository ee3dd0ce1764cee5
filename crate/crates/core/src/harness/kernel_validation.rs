use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{GraphSpec, Seeds};
use super::experiment::cell_seed;
use super::stats::{median, spearman_rho};
use crate::gp::{fit_on_laplacian, FitConfig, TrainSet};
use crate::graph::diameter;
use crate::spectral::{scaled_laplacian, KernelFamily, ScaledLaplacian};
use crate::{Error, Result};

/// Largest graph whose full Laplacian is decomposed.
pub const MAX_NODES: usize = 1000;
/// Points on the λ-grid at which learned `r⁻¹` curves are sampled.
pub const CURVE_POINTS: usize = 101;

fn default_eigen_index() -> usize {
    1
}
fn default_train_fraction() -> f64 {
    0.5
}
fn default_kernels() -> Vec<KernelFamily> {
    KernelFamily::ALL.to_vec()
}
fn default_true() -> bool {
    true
}
fn default_seeds() -> Seeds {
    Seeds::Count(10)
}

/// Regression of a Laplacian eigenvector from a subset of its entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelValidationConfig {
    pub graph: GraphSpec,
    /// 0-based position in ascending eigenvalue order; 1 is the second smallest.
    #[serde(default = "default_eigen_index")]
    pub eigen_index: usize,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    /// Gaussian noise added to training targets.
    #[serde(default)]
    pub noise_sd: f64,
    #[serde(default = "default_kernels")]
    pub kernels: Vec<KernelFamily>,
    #[serde(default = "default_seeds")]
    pub seeds: Seeds,
    #[serde(default)]
    pub master_seed: u64,
    /// Redraw random graphs for every seed (generator seed + seed index).
    #[serde(default = "default_true")]
    pub resample_graph: bool,
    /// Randomly permute targets across nodes (null check).
    #[serde(default)]
    pub shuffle_targets: bool,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl KernelValidationConfig {
    pub fn new(graph: GraphSpec) -> Self {
        Self {
            graph,
            eigen_index: default_eigen_index(),
            train_fraction: default_train_fraction(),
            noise_sd: 0.0,
            kernels: default_kernels(),
            seeds: default_seeds(),
            master_seed: 0,
            resample_graph: true,
            shuffle_targets: false,
            fit: FitConfig::default(),
            output_dir: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let c: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate_static()?;
        Ok(c)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| e.context(path.display()))
    }

    fn validate_static(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!("train_fraction must lie in (0, 1), got {}", self.train_fraction)));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::Config(format!("noise_sd must be finite and non-negative, got {}", self.noise_sd)));
        }
        if self.kernels.is_empty() {
            return Err(Error::Config("kernels must not be empty".into()));
        }
        if self.seeds.indices().is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        Ok(())
    }
}

/// Results for one kernel family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyValidation {
    pub family: KernelFamily,
    /// Held-out Spearman ρ per seed, in seed order. A failed fit is `None`.
    pub rho: Vec<Option<f64>>,
    pub median_rho: Option<f64>,
    /// Learned `r⁻¹(λ)` on the λ-grid, one curve per seed.
    pub curves: Vec<Option<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelValidationReport {
    pub config: KernelValidationConfig,
    pub nodes: usize,
    pub train_size: usize,
    pub lambda_grid: Vec<f64>,
    pub families: Vec<FamilyValidation>,
}

impl KernelValidationReport {
    pub fn family(&self, f: KernelFamily) -> Option<&FamilyValidation> {
        self.families.iter().find(|v| v.family == f)
    }
}

struct ValidationGraph {
    lap: Arc<ScaledLaplacian>,
    eta: usize,
    target: Vec<f64>,
}

impl ValidationGraph {
    fn build(spec: &GraphSpec, config: &KernelValidationConfig, base_dir: &Path) -> Result<Self> {
        let graph = spec.build(base_dir).map_err(|e| e.context("building graph"))?;
        let n = graph.node_count();
        if n > MAX_NODES {
            return Err(Error::Config(format!(
                "kernel validation needs the full eigendecomposition; {n} nodes exceeds {MAX_NODES}"
            )));
        }
        if n < 2 || config.eigen_index >= n {
            return Err(Error::Config(format!("eigen_index {} out of range for {n} nodes", config.eigen_index)));
        }
        let lap = Arc::new(scaled_laplacian(&graph));
        let eta = config.fit.eta.unwrap_or_else(|| diameter(&graph).unwrap_or(5).clamp(1, 5));
        let target = lap.eigenvectors().column(config.eigen_index).iter().copied().collect();
        Ok(Self { lap, eta, target })
    }
}

/// Fits every kernel family to a chosen Laplacian eigenvector observed on a
/// random subset of nodes and scores held-out predictions by Spearman ρ
/// against the noiseless targets.
pub fn kernel_validation(config: &KernelValidationConfig, base_dir: &Path) -> Result<KernelValidationReport> {
    config.validate_static()?;
    let lambda_grid: Vec<f64> = (0..CURVE_POINTS).map(|i| i as f64 / (CURVE_POINTS - 1) as f64).collect();
    let noise = Normal::new(0.0, config.noise_sd).map_err(|e| Error::Config(e.to_string()))?;
    let mut problem = None;
    let mut n = 0;
    let mut train_size = 0;

    let mut families: Vec<FamilyValidation> = config
        .kernels
        .iter()
        .map(|&family| FamilyValidation { family, rho: vec![], median_rho: None, curves: vec![] })
        .collect();
    for s in config.seeds.indices() {
        if problem.is_none() || config.resample_graph {
            let spec = if config.resample_graph { config.graph.reseeded(s) } else { config.graph.clone() };
            let p = ValidationGraph::build(&spec, config, base_dir)?;
            n = p.lap.dim();
            train_size = ((config.train_fraction * n as f64).round() as usize).clamp(1, n - 1);
            problem = Some(p);
        }
        let ValidationGraph { lap, eta, target: base } = problem.as_ref().expect("built above");
        let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(config.master_seed, "kernel-validation", s));
        let mut truth = base.clone();
        if config.shuffle_targets {
            truth.shuffle(&mut rng);
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let (train_idx, test_idx) = order.split_at(train_size);
        let y: Vec<f64> = train_idx
            .iter()
            .map(|&i| truth[i] + if config.noise_sd > 0.0 { noise.sample(&mut rng) } else { 0.0 })
            .collect();
        let train = TrainSet::new(train_idx.to_vec(), y)?;
        let held: Vec<f64> = test_idx.iter().map(|&i| truth[i]).collect();
        families.par_iter_mut().for_each(|fam| {
            let mut fit_rng = ChaCha8Rng::seed_from_u64(cell_seed(config.master_seed, fam.family.as_str(), s));
            let scored =
                fit_on_laplacian(lap.clone(), *eta, &train, fam.family, &config.fit, &mut fit_rng).and_then(|model| {
                    let (mean, _) = model.predict(test_idx)?;
                    let rho = spearman_rho(&mean, &held)?;
                    let eig = lap.eigenvalues();
                    let curve = lambda_grid.iter().map(|&l| model.spec().inverse_reg_at(l, eig)).collect();
                    Ok((rho, curve))
                });
            match scored {
                Ok((rho, curve)) => {
                    fam.rho.push(Some(rho));
                    fam.curves.push(Some(curve));
                }
                Err(e) => {
                    log::warn!("{} seed {s}: {e}", fam.family);
                    fam.rho.push(None);
                    fam.curves.push(None);
                }
            }
        });
    }
    for fam in &mut families {
        let ok: Vec<f64> = fam.rho.iter().flatten().copied().collect();
        fam.median_rho = (!ok.is_empty()).then(|| median(&ok));
    }
    let report = KernelValidationReport { config: config.clone(), nodes: n, train_size, lambda_grid, families };
    if let Some(dir) = &config.output_dir {
        write_report(&base_dir.join(dir), &report)?;
    }
    Ok(report)
}

/// Writes `kernel_validation.json`, `rho.csv` and `curves.csv` into `dir`.
pub fn write_report(dir: &Path, report: &KernelValidationReport) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let f = std::fs::File::create(dir.join("kernel_validation.json"))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(f), report)?;

    let mut rho = csv::Writer::from_path(dir.join("rho.csv"))?;
    rho.write_record(["family", "seed", "rho"])?;
    let seeds = report.config.seeds.indices();
    for fam in &report.families {
        for (s, r) in seeds.iter().zip(&fam.rho) {
            rho.write_record([
                fam.family.as_str().to_string(),
                s.to_string(),
                r.map(|v| v.to_string()).unwrap_or_default(),
            ])?;
        }
    }
    rho.flush()?;

    let mut curves = csv::Writer::from_path(dir.join("curves.csv"))?;
    curves.write_record(["family", "seed", "lambda", "r_inv"])?;
    for fam in &report.families {
        for (s, c) in seeds.iter().zip(&fam.curves) {
            let Some(c) = c else { continue };
            for (l, v) in report.lambda_grid.iter().zip(c) {
                curves.write_record([fam.family.as_str().to_string(), s.to_string(), l.to_string(), v.to_string()])?;
            }
        }
    }
    curves.flush()?;
    Ok(())
}
