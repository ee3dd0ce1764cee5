//! Gaussian-process regression over the nodes of an ego-network.
//!
//! Targets are standardised before fitting and the GP has zero prior mean in
//! standardised units. Kernel hyperparameters, the output scale and the
//! noise variance are fitted jointly by maximising the log marginal
//! likelihood from several initialisations.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::graph::EgoNet;
use crate::optim::{maximize, AscentConfig};
use crate::spectral::{default_eta, scaled_laplacian, KernelFamily, KernelSpec, ScaledLaplacian, DEFAULT_EPSILON};
use crate::{Error, Result};

/// Smallest noise variance (standardised units) a model may use.
pub const NOISE_FLOOR: f64 = 1e-6;
const MAX_JITTER: f64 = 1e-2;
const STD_FLOOR: f64 = 1e-8;
const RAW_BOUND: f64 = 30.0;

/// Affine map between raw objective units and standardised units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Standardizer {
    pub mean: f64,
    pub std: f64,
}

impl Standardizer {
    /// Mean and population standard deviation of `y`, with the deviation
    /// floored at `1e-8`.
    pub fn fit(y: &[f64]) -> Self {
        let n = y.len().max(1) as f64;
        let mean = y.iter().sum::<f64>() / n;
        let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Self { mean, std: var.sqrt().max(STD_FLOOR) }
    }

    pub fn standardize(&self, y: f64) -> f64 {
        (y - self.mean) / self.std
    }

    pub fn destandardize(&self, z: f64) -> f64 {
        z * self.std + self.mean
    }
}

/// Observations at local ego-net indices.
#[derive(Clone, Debug)]
pub struct TrainSet {
    indices: Vec<usize>,
    y: Vec<f64>,
    z: Vec<f64>,
    standardizer: Standardizer,
}

impl TrainSet {
    pub fn new(indices: Vec<usize>, y: Vec<f64>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Input("training set is empty".into()));
        }
        if indices.len() != y.len() {
            return Err(Error::Input("training indices and targets differ in length".into()));
        }
        let mut sorted = indices.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Input("training indices must be unique".into()));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("training targets must be finite".into()));
        }
        let standardizer = Standardizer::fit(&y);
        let z = y.iter().map(|&v| standardizer.standardize(v)).collect();
        Ok(Self { indices, y, z, standardizer })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn targets(&self) -> &[f64] {
        &self.y
    }

    pub fn standardized(&self) -> &[f64] {
        &self.z
    }

    pub fn standardizer(&self) -> Standardizer {
        self.standardizer
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        match self.indices.iter().find(|&&i| i >= dim) {
            Some(i) => Err(Error::Input(format!("training index {i} outside ego-net of {dim} nodes"))),
            None => Ok(()),
        }
    }
}

/// Hyperparameter fitting options.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub n_restarts: usize,
    pub ascent: AscentConfig,
    pub learn_output_scale: bool,
    pub learn_noise: bool,
    /// Starting noise variance, and the fixed value when noise is not learned.
    pub noise_init: f64,
    pub epsilon: f64,
    /// Matérn smoothness.
    pub nu: f64,
    /// Overrides the diameter-based kernel order of the polynomial pair.
    pub eta: Option<usize>,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            n_restarts: 3,
            ascent: AscentConfig::default(),
            learn_output_scale: true,
            learn_noise: true,
            noise_init: 1e-2,
            epsilon: DEFAULT_EPSILON,
            nu: 2.5,
            eta: None,
        }
    }
}

/// Log marginal likelihood and its gradient.
#[derive(Clone, Debug)]
pub struct Lml {
    pub value: f64,
    /// `∂/∂β_j` for every β entry, then `∂/∂s` (output scale), then `∂/∂σ²`.
    pub gradient: Vec<f64>,
}

/// `K̂ = K_train + σ² I` for fixed hyperparameters, factorised in the
/// eigenbasis: with `B = U_t W^½`, `A = BᵀB + σ² I` and
/// `K̂⁻¹ = (I − B A⁻¹ Bᵀ) / σ²`.
///
/// Working with `A` keeps kernels that put very large prior variance on a few
/// modes (sum-of-inverse puts ~1/ε on λ = 0) accurate: there the large
/// weights are a diagonal scaling of `A`, which Cholesky is insensitive to,
/// whereas in node space they swamp every entry of `K_train`.
struct Factor {
    chol: Cholesky<f64, Dyn>,
    sqrt_w: Vec<f64>,
    /// Total diagonal term `σ² + jitter`.
    s2: f64,
    alpha: DVector<f64>,
    /// Posterior mean coefficients in the eigenbasis, `W^½ A⁻¹ W^½ U_tᵀ z`.
    coef: DVector<f64>,
    jitter: f64,
}

impl Factor {
    /// `ln det K̂`.
    fn log_det(&self, n: usize) -> f64 {
        let dim = self.sqrt_w.len();
        let l: f64 = self.chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum();
        2.0 * l + (n as f64 - dim as f64) * self.s2.ln()
    }
}

/// Training rows of the eigenvector matrix plus everything an LML
/// evaluation needs that does not depend on hyperparameters.
struct Problem<'a> {
    lap: &'a ScaledLaplacian,
    u_train: DMatrix<f64>,
    /// `U_tᵀ U_t`.
    gram: DMatrix<f64>,
    /// `U_tᵀ z`.
    u_z: DVector<f64>,
    z: DVector<f64>,
}

impl<'a> Problem<'a> {
    fn new(lap: &'a ScaledLaplacian, train: &TrainSet) -> Self {
        let u = lap.eigenvectors();
        let u_train = DMatrix::from_fn(train.len(), u.ncols(), |r, c| u[(train.indices[r], c)]);
        let z = DVector::from_column_slice(&train.z);
        let gram = u_train.tr_mul(&u_train);
        let u_z = u_train.tr_mul(&z);
        Self { lap, u_train, gram, u_z, z }
    }

    fn factor(&self, spec: &KernelSpec, noise: f64) -> Result<Factor> {
        let w = spec.spectral_weights(self.lap.eigenvalues());
        let sqrt_w: Vec<f64> = w.iter().map(|x| x.max(0.0).sqrt()).collect();
        let dim = sqrt_w.len();
        let mut a = DMatrix::from_fn(dim, dim, |i, j| sqrt_w[i] * self.gram[(i, j)] * sqrt_w[j]);
        crate::spectral::symmetrize(&mut a);
        let mut jitter = 0.0;
        loop {
            let s2 = noise + jitter;
            let mut aj = a.clone();
            for i in 0..dim {
                aj[(i, i)] += s2;
            }
            if let Some(chol) = Cholesky::new(aj) {
                let bz = DVector::from_fn(dim, |i, _| sqrt_w[i] * self.u_z[i]);
                let c = chol.solve(&bz);
                let wc = DVector::from_fn(dim, |i, _| sqrt_w[i] * c[i]);
                let alpha = (&self.z - &self.u_train * &wc) / s2;
                if alpha.iter().all(|a| a.is_finite()) {
                    return Ok(Factor { chol, sqrt_w, s2, alpha, coef: wc, jitter });
                }
            }
            jitter = if jitter == 0.0 { NOISE_FLOOR * 10.0 } else { jitter * 10.0 };
            if jitter > MAX_JITTER * (1.0 + 1e-9) {
                return Err(Error::Fit("Gram matrix not positive definite after maximum jitter".into()));
            }
        }
    }

    fn value(&self, f: &Factor) -> f64 {
        let n = self.z.len();
        -0.5 * self.z.dot(&f.alpha) - 0.5 * f.log_det(n) - 0.5 * n as f64 * (2.0 * PI).ln()
    }

    fn lml(&self, spec: &KernelSpec, noise: f64) -> Result<Lml> {
        let n = self.z.len();
        let eig = self.lap.eigenvalues();
        let f = self.factor(spec, noise)?;
        let value = self.value(&f);

        // ∂LML/∂θ = ½ tr(W ∂K/∂θ) with W = ααᵀ − K̂⁻¹ and ∂K/∂θ = U_t diag(∂w) U_tᵀ,
        // so only q_i = u_iᵀ W u_i is needed, u_i being column i of U_t.
        // With Y = L⁻¹ Bᵀ, K̂⁻¹ = (I − YᵀY) / σ².
        let dim = f.sqrt_w.len();
        let bt = DMatrix::from_fn(dim, n, |i, r| f.sqrt_w[i] * self.u_train[(r, i)]);
        let y = f.chol.l_dirty().solve_lower_triangular(&bt).expect("Cholesky factor is non-singular");
        let yty = y.tr_mul(&y);
        let m = &yty * &self.u_train;
        let ua = self.u_train.tr_mul(&f.alpha);
        let q: Vec<f64> = (0..dim)
            .map(|i| {
                let quad = self.u_train.column(i).dot(&m.column(i));
                ua[i] * ua[i] - (self.gram[(i, i)] - quad) / f.s2
            })
            .collect();
        let mut gradient = Vec::with_capacity(spec.beta.len() + 2);
        for h in spec.learnable() {
            let dw = spec.spectral_weight_grad(eig, h)?;
            gradient.push(0.5 * dw.iter().zip(&q).map(|(a, b)| a * b).sum::<f64>());
        }
        let trace_inv = (n as f64 - yty.trace()) / f.s2;
        gradient.push(0.5 * (f.alpha.norm_squared() - trace_inv));
        Ok(Lml { value, gradient })
    }
}

/// Log marginal likelihood of the standardised targets under the kernel
/// `spec` on `lap` with noise variance `noise` (floored at [`NOISE_FLOOR`]).
pub fn log_marginal_likelihood(lap: &ScaledLaplacian, train: &TrainSet, spec: &KernelSpec, noise: f64) -> Result<Lml> {
    spec.validate(lap.dim())?;
    train.check_dim(lap.dim())?;
    if !(noise >= 0.0) {
        return Err(Error::Input("noise variance must be non-negative".into()));
    }
    Problem::new(lap, train).lml(spec, noise.max(NOISE_FLOOR))
}

/// Diagnostics from hyperparameter fitting.
#[derive(Clone, Debug, Default)]
pub struct FitReport {
    /// LML at each initialisation that was defined.
    pub initial_lml: Vec<f64>,
    /// LML after ascent from each of those initialisations.
    pub final_lml: Vec<f64>,
    pub iterations: usize,
}

/// A fitted GP surrogate.
#[derive(Clone)]
pub struct GpModel {
    lap: Arc<ScaledLaplacian>,
    spec: KernelSpec,
    noise: f64,
    jitter: f64,
    train: TrainSet,
    coef: DVector<f64>,
    lml: f64,
    report: FitReport,
}

impl std::fmt::Debug for GpModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GpModel")
            .field("spec", &self.spec)
            .field("noise", &self.noise)
            .field("jitter", &self.jitter)
            .field("lml", &self.lml)
            .finish_non_exhaustive()
    }
}

/// Mapping between the unconstrained optimisation vector and hyperparameters.
struct Param<'a> {
    template: &'a KernelSpec,
    learn_scale: bool,
    learn_noise: bool,
    fixed_noise: f64,
}

impl Param<'_> {
    fn decode(&self, x: &[f64]) -> Option<(KernelSpec, f64)> {
        if x.iter().any(|v| v.abs() > RAW_BOUND) {
            return None;
        }
        let nb = self.template.beta.len();
        let mut spec = self.template.clone();
        spec.beta = x[..nb].iter().map(|r| r.exp()).collect();
        let mut k = nb;
        if self.learn_scale {
            spec.output_scale = x[k].exp();
            k += 1;
        }
        let noise = if self.learn_noise { NOISE_FLOOR + x[k].exp() } else { self.fixed_noise };
        Some((spec, noise))
    }

    fn encode(&self, spec: &KernelSpec, noise: f64) -> Vec<f64> {
        let mut x: Vec<f64> = spec.beta.iter().map(|b| b.max(1e-300).ln().clamp(-RAW_BOUND, RAW_BOUND)).collect();
        if self.learn_scale {
            x.push(spec.output_scale.ln());
        }
        if self.learn_noise {
            x.push((noise - NOISE_FLOOR).max(1e-12).ln());
        }
        x
    }

    fn raw_gradient(&self, spec: &KernelSpec, noise: f64, g: &[f64]) -> Vec<f64> {
        let nb = spec.beta.len();
        let mut out: Vec<f64> = (0..nb).map(|j| g[j] * spec.beta[j]).collect();
        if self.learn_scale {
            out.push(g[nb] * spec.output_scale);
        }
        if self.learn_noise {
            out.push(g[nb + 1] * (noise - NOISE_FLOOR));
        }
        out
    }
}

/// Fits a GP with kernel `family` over `egonet`.
pub fn fit<R: Rng + ?Sized>(
    egonet: &EgoNet,
    train: &TrainSet,
    family: KernelFamily,
    config: &FitConfig,
    rng: &mut R,
) -> Result<GpModel> {
    let lap = Arc::new(scaled_laplacian(egonet.adjacency()));
    let eta = config.eta.unwrap_or_else(|| default_eta(egonet));
    fit_on_laplacian(lap, eta, train, family, config, rng)
}

/// As [`fit`], for a precomputed Laplacian and kernel order.
pub fn fit_on_laplacian<R: Rng + ?Sized>(
    lap: Arc<ScaledLaplacian>,
    eta: usize,
    train: &TrainSet,
    family: KernelFamily,
    config: &FitConfig,
    rng: &mut R,
) -> Result<GpModel> {
    train.check_dim(lap.dim())?;
    let mut template = KernelSpec::initial(family, lap.dim(), eta);
    template.epsilon = config.epsilon;
    template.nu = config.nu;
    let param = Param {
        template: &template,
        learn_scale: config.learn_output_scale,
        learn_noise: config.learn_noise,
        fixed_noise: config.noise_init.max(NOISE_FLOOR),
    };
    let problem = Problem::new(&lap, train);
    let objective = |x: &[f64]| -> Option<(f64, Vec<f64>)> {
        let (spec, noise) = param.decode(x)?;
        let lml = problem.lml(&spec, noise).ok()?;
        Some((lml.value, param.raw_gradient(&spec, noise, &lml.gradient)))
    };

    let mut report = FitReport::default();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let noise0 = config.noise_init.max(NOISE_FLOOR * 2.0);
    for restart in 0..config.n_restarts.max(1) {
        let x0 = if restart == 0 {
            param.encode(&template, noise0)
        } else {
            let mut x = param.encode(&template, noise0);
            for v in &mut x {
                let e: f64 = StandardNormal.sample(rng);
                *v += e;
            }
            x
        };
        let Some((init, _)) = objective(&x0) else {
            continue;
        };
        let Some(res) = maximize(objective, x0, config.ascent) else {
            continue;
        };
        report.initial_lml.push(init);
        report.final_lml.push(res.value);
        report.iterations += res.iterations;
        if best.as_ref().is_none_or(|(v, _)| res.value > *v) {
            best = Some((res.value, res.x));
        }
    }
    let (_, x) = best.ok_or_else(|| Error::Fit("no initialisation produced a positive-definite Gram matrix".into()))?;
    let (spec, noise) = param.decode(&x).expect("optimiser stays inside bounds");
    let mut model = GpModel::with_hyperparameters(lap.clone(), train.clone(), spec, noise)?;
    model.report = report;
    Ok(model)
}

impl GpModel {
    /// Conditions the GP on `train` with fixed hyperparameters.
    pub fn with_hyperparameters(
        lap: Arc<ScaledLaplacian>,
        train: TrainSet,
        spec: KernelSpec,
        noise: f64,
    ) -> Result<Self> {
        spec.validate(lap.dim())?;
        train.check_dim(lap.dim())?;
        let noise = noise.max(NOISE_FLOOR);
        let (factor, lml) = {
            let problem = Problem::new(&lap, &train);
            let f = problem.factor(&spec, noise)?;
            let lml = problem.value(&f);
            (f, lml)
        };
        Ok(Self {
            lap,
            spec,
            noise,
            jitter: factor.jitter,
            train,
            coef: factor.coef,
            lml,
            report: FitReport::default(),
        })
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    /// Noise variance in standardised units.
    pub fn noise(&self) -> f64 {
        self.noise
    }

    /// Extra diagonal jitter the factorisation needed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn log_marginal_likelihood(&self) -> f64 {
        self.lml
    }

    pub fn report(&self) -> &FitReport {
        &self.report
    }

    pub fn laplacian(&self) -> &ScaledLaplacian {
        &self.lap
    }

    pub fn train(&self) -> &TrainSet {
        &self.train
    }

    /// Posterior means and variances (latent function, raw units) at local
    /// indices `query`.
    pub fn predict(&self, query: &[usize]) -> Result<(Vec<f64>, Vec<f64>)> {
        let dim = self.lap.dim();
        if let Some(q) = query.iter().find(|&&q| q >= dim) {
            return Err(Error::Input(format!("query index {q} outside ego-net of {dim} nodes")));
        }
        let u = self.lap.eigenvectors();
        let w = self.spec.spectral_weights(self.lap.eigenvalues());
        let nq = query.len();
        let nt = self.train.len();
        let u_train = DMatrix::from_fn(nt, dim, |r, c| u[(self.train.indices[r], c)]);
        // k_*ᵀ K̂⁻¹ z = u_q W^½ A⁻¹ W^½ U_tᵀ z
        let mean_z = DVector::from_fn(nq, |r, _| (0..dim).map(|c| u[(query[r], c)] * self.coef[c]).sum::<f64>());

        // Variance in the push-through form σ² b (BᵀB + σ²I)⁻¹ bᵀ with
        // B = U_t W^½ and b = u_q W^½. Every term is nonnegative, so the
        // large prior modes of some kernels do not cancel catastrophically
        // as they do in k** − k*ᵀ K̂⁻¹ k*.
        let s2 = self.noise + self.jitter;
        let sqrt_w: Vec<f64> = w.iter().map(|x| x.max(0.0).sqrt()).collect();
        let b = DMatrix::from_fn(nt, dim, |r, c| u_train[(r, c)] * sqrt_w[c]);
        let mut a = b.transpose() * &b;
        for i in 0..dim {
            a[(i, i)] += s2;
        }
        crate::spectral::symmetrize(&mut a);
        let chol_a =
            Cholesky::new(a).ok_or_else(|| Error::Numerical("posterior precision not positive definite".into()))?;
        let bq = DMatrix::from_fn(dim, nq, |c, r| u[(query[r], c)] * sqrt_w[c]);
        let v = chol_a.l().solve_lower_triangular(&bq).expect("Cholesky factor is non-singular");

        let st = self.train.standardizer;
        let mut means = Vec::with_capacity(nq);
        let mut vars = Vec::with_capacity(nq);
        for r in 0..nq {
            means.push(st.destandardize(mean_z[r]));
            vars.push(s2 * v.column(r).norm_squared() * st.std * st.std);
        }
        Ok((means, vars))
    }
}
