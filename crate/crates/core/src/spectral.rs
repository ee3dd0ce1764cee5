//! Spectral kernels on graphs.
//!
//! Every kernel here has the form `K = s · Σᵢ r⁻¹(λᵢ) uᵢ uᵢᵀ`, where `(λᵢ, uᵢ)`
//! are the eigenpairs of the scaled normalised Laplacian
//! `½ (I − D^{-1/2} A D^{-1/2})`, `r` is a positive regularisation function
//! chosen by the kernel family, and `s` is an output scale. Positivity of `r`
//! makes every kernel positive semi-definite.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::graph::{diameter, AdjacencyGraph, EgoNet};
use crate::{Error, Result};

const EIGEN_CLAMP_TOL: f64 = 1e-8;

/// Default `ε` added inside polynomial regularisers.
pub const DEFAULT_EPSILON: f64 = 1e-8;

/// Dense eigendecomposition of the scaled normalised Laplacian.
#[derive(Clone, Debug)]
pub struct ScaledLaplacian {
    matrix: DMatrix<f64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl ScaledLaplacian {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Ascending eigenvalues in `[0, 1]`.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as columns, matching [`eigenvalues`](Self::eigenvalues).
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }
}

/// Builds `½ (I − D^{-1/2} A D^{-1/2})` and its ascending eigendecomposition.
///
/// Isolated nodes get `D^{-1/2} = 0`, so their diagonal entry is ½.
pub fn scaled_laplacian(g: &AdjacencyGraph) -> ScaledLaplacian {
    let n = g.node_count();
    let inv_sqrt_deg: Vec<f64> = g
        .nodes()
        .map(|v| match g.degree(v) {
            0 => 0.0,
            d => 1.0 / (d as f64).sqrt(),
        })
        .collect();
    let mut matrix = DMatrix::<f64>::identity(n, n) * 0.5;
    for (u, v) in g.edges() {
        let w = -0.5 * inv_sqrt_deg[u.index()] * inv_sqrt_deg[v.index()];
        matrix[(u.index(), v.index())] = w;
        matrix[(v.index(), u.index())] = w;
    }

    let eig = SymmetricEigen::new(matrix.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = DVector::from_iterator(
        n,
        order.iter().map(|&i| {
            let l = eig.eigenvalues[i];
            if l.abs() < EIGEN_CLAMP_TOL {
                0.0
            } else if (l - 1.0).abs() < EIGEN_CLAMP_TOL {
                1.0
            } else {
                l
            }
        }),
    );
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    ScaledLaplacian { matrix, eigenvalues, eigenvectors }
}

/// The regularisation-function family of a spectral kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    /// `r(λᵢ) = exp(βᵢ λᵢ)` with one `βᵢ` per eigenvalue.
    DiffusionArd,
    /// `r(λ) = exp(β λ)`.
    Diffusion,
    /// `r(λ) = Σ_α β_α λ^α + ε`, `α = 0..η`.
    Polynomial,
    /// `r(λ) = (Σ_α 1 / (β_α λ^α + ε))⁻¹`, `α = 0..η`.
    SumInverse,
    /// `r(λ) = (β ν + λ)^ν`.
    Matern,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 5] = [
        KernelFamily::DiffusionArd,
        KernelFamily::Diffusion,
        KernelFamily::Polynomial,
        KernelFamily::SumInverse,
        KernelFamily::Matern,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            KernelFamily::DiffusionArd => "diffusion_ard",
            KernelFamily::Diffusion => "diffusion",
            KernelFamily::Polynomial => "polynomial",
            KernelFamily::SumInverse => "sum_inverse",
            KernelFamily::Matern => "matern",
        }
    }

    /// Whether the kernel order `η` (and hence the β length) follows the
    /// ego-net diameter.
    pub fn uses_order(self) -> bool {
        matches!(self, KernelFamily::Polynomial | KernelFamily::SumInverse)
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KernelFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        KernelFamily::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Input(format!("unknown kernel family `{s}`")))
    }
}

/// A hyperparameter of a [`KernelSpec`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hyperparameter {
    Beta(usize),
    OutputScale,
    Epsilon,
    Nu,
    Eta,
}

/// One fully specified spectral kernel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub beta: Vec<f64>,
    pub nu: f64,
    pub epsilon: f64,
    pub output_scale: f64,
}

impl KernelSpec {
    pub fn diffusion(beta: f64) -> Self {
        Self::new(KernelFamily::Diffusion, vec![beta])
    }

    pub fn diffusion_ard(beta: Vec<f64>) -> Self {
        Self::new(KernelFamily::DiffusionArd, beta)
    }

    /// Polynomial kernel of order `beta.len()`.
    pub fn polynomial(beta: Vec<f64>) -> Self {
        Self::new(KernelFamily::Polynomial, beta)
    }

    /// Sum-of-inverse-polynomials kernel of order `beta.len()`.
    pub fn sum_inverse(beta: Vec<f64>) -> Self {
        Self::new(KernelFamily::SumInverse, beta)
    }

    pub fn matern(beta: f64, nu: f64) -> Self {
        Self { nu, ..Self::new(KernelFamily::Matern, vec![beta]) }
    }

    fn new(family: KernelFamily, beta: Vec<f64>) -> Self {
        Self { family, beta, nu: 2.5, epsilon: DEFAULT_EPSILON, output_scale: 1.0 }
    }

    /// Default spec of a family for an `n`-node graph with kernel order `eta`.
    pub fn initial(family: KernelFamily, n: usize, eta: usize) -> Self {
        let len = match family {
            KernelFamily::DiffusionArd => n,
            KernelFamily::Polynomial | KernelFamily::SumInverse => eta.max(1),
            KernelFamily::Diffusion | KernelFamily::Matern => 1,
        };
        Self::new(family, vec![1.0; len])
    }

    pub fn with_output_scale(mut self, s: f64) -> Self {
        self.output_scale = s;
        self
    }

    pub fn with_epsilon(mut self, eps: f64) -> Self {
        self.epsilon = eps;
        self
    }

    /// Kernel order `η` (length of β for the polynomial pair).
    pub fn eta(&self) -> usize {
        self.beta.len()
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.beta.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
            return Err(Error::Input(format!("kernel β must be finite and non-negative: {:?}", self.beta)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Input("kernel ε must be positive".into()));
        }
        if !(self.output_scale > 0.0 && self.output_scale.is_finite()) {
            return Err(Error::Input("kernel output scale must be positive".into()));
        }
        let expected = match self.family {
            KernelFamily::DiffusionArd => Some(dim),
            KernelFamily::Diffusion | KernelFamily::Matern => Some(1),
            KernelFamily::Polynomial | KernelFamily::SumInverse => None,
        };
        if let Some(len) = expected {
            if self.beta.len() != len {
                return Err(Error::Input(format!(
                    "{} kernel needs {} β values, got {}",
                    self.family,
                    len,
                    self.beta.len()
                )));
            }
        } else if self.beta.is_empty() {
            return Err(Error::Input("kernel order η must be at least 1".into()));
        }
        if self.family == KernelFamily::Matern && !(self.nu > 0.0) {
            return Err(Error::Input("Matérn ν must be positive".into()));
        }
        if self.family == KernelFamily::Matern && !(self.beta[0] > 0.0) {
            return Err(Error::Input("Matérn β must be positive, otherwise r(0) = 0".into()));
        }
        Ok(())
    }

    /// `r(λ)` for eigenvalue index `i` (the index only matters for ARD).
    pub fn reg_fn(&self, lambda: f64, i: usize) -> f64 {
        match self.family {
            KernelFamily::SumInverse => 1.0 / self.inverse_reg(lambda, i),
            KernelFamily::DiffusionArd => (self.beta[i] * lambda).exp(),
            KernelFamily::Diffusion => (self.beta[0] * lambda).exp(),
            KernelFamily::Polynomial => poly(&self.beta, lambda) + self.epsilon,
            KernelFamily::Matern => (self.beta[0] * self.nu + lambda).powf(self.nu),
        }
    }

    /// `r⁻¹(λ)`, excluding the output scale.
    pub fn inverse_reg(&self, lambda: f64, i: usize) -> f64 {
        match self.family {
            KernelFamily::SumInverse => {
                self.beta.iter().enumerate().map(|(a, &b)| 1.0 / (b * lambda.powi(a as i32) + self.epsilon)).sum()
            }
            _ => 1.0 / self.reg_fn(lambda, i),
        }
    }

    /// Learnable hyperparameters in their canonical order: every β entry,
    /// then the output scale.
    pub fn learnable(&self) -> Vec<Hyperparameter> {
        (0..self.beta.len()).map(Hyperparameter::Beta).chain(std::iter::once(Hyperparameter::OutputScale)).collect()
    }

    /// `∂ r⁻¹(λᵢ) / ∂β_j` (output scale excluded).
    fn inverse_reg_dbeta(&self, lambda: f64, i: usize, j: usize) -> f64 {
        match self.family {
            KernelFamily::DiffusionArd => {
                if i == j {
                    -lambda * (-self.beta[i] * lambda).exp()
                } else {
                    0.0
                }
            }
            KernelFamily::Diffusion => -lambda * (-self.beta[0] * lambda).exp(),
            KernelFamily::Polynomial => {
                let p = poly(&self.beta, lambda) + self.epsilon;
                -lambda.powi(j as i32) / (p * p)
            }
            KernelFamily::SumInverse => {
                let la = lambda.powi(j as i32);
                let d = self.beta[j] * la + self.epsilon;
                -la / (d * d)
            }
            KernelFamily::Matern => {
                let nu = self.nu;
                -nu * nu * (self.beta[0] * nu + lambda).powf(-nu - 1.0)
            }
        }
    }

    /// Per-eigencomponent weights `s · r⁻¹(λᵢ)`.
    pub fn spectral_weights(&self, eigenvalues: &DVector<f64>) -> Vec<f64> {
        eigenvalues.iter().enumerate().map(|(i, &l)| self.output_scale * self.inverse_reg(l, i)).collect()
    }

    /// Derivative of every spectral weight with respect to `hyper`.
    pub fn spectral_weight_grad(&self, eigenvalues: &DVector<f64>, hyper: Hyperparameter) -> Result<Vec<f64>> {
        match hyper {
            Hyperparameter::Beta(j) if j < self.beta.len() => Ok(eigenvalues
                .iter()
                .enumerate()
                .map(|(i, &l)| self.output_scale * self.inverse_reg_dbeta(l, i, j))
                .collect()),
            Hyperparameter::Beta(j) => Err(Error::Input(format!("β index {j} out of range"))),
            Hyperparameter::OutputScale => {
                Ok(eigenvalues.iter().enumerate().map(|(i, &l)| self.inverse_reg(l, i)).collect())
            }
            other => Err(Error::Input(format!("{other:?} is not a learnable hyperparameter"))),
        }
    }

    /// Diffusion-ARD β evaluated at an arbitrary `λ` by linear interpolation
    /// between neighbouring eigenvalues; other families ignore the index.
    pub fn inverse_reg_at(&self, lambda: f64, eigenvalues: &DVector<f64>) -> f64 {
        if self.family != KernelFamily::DiffusionArd {
            return self.output_scale * self.inverse_reg(lambda, 0);
        }
        let ev = eigenvalues.as_slice();
        let beta = match ev.iter().position(|&e| e >= lambda) {
            None => *self.beta.last().unwrap_or(&0.0),
            Some(0) => self.beta[0],
            Some(k) => {
                let (l0, l1) = (ev[k - 1], ev[k]);
                let t = if l1 > l0 { (lambda - l0) / (l1 - l0) } else { 0.0 };
                self.beta[k - 1] * (1.0 - t) + self.beta[k] * t
            }
        };
        self.output_scale * (-beta * lambda).exp()
    }
}

fn poly(beta: &[f64], lambda: f64) -> f64 {
    beta.iter().rev().fold(0.0, |acc, &b| acc * lambda + b)
}

/// `U diag(w) Uᵀ`.
pub fn spectral_matrix(u: &DMatrix<f64>, weights: &[f64]) -> DMatrix<f64> {
    let scaled = DMatrix::from_fn(u.nrows(), u.ncols(), |r, c| u[(r, c)] * weights[c]);
    let mut out = &scaled * u.transpose();
    symmetrize(&mut out);
    out
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let a = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = a;
            m[(j, i)] = a;
        }
    }
}

/// Full `ñ × ñ` kernel matrix.
pub fn kernel_matrix(lap: &ScaledLaplacian, spec: &KernelSpec) -> Result<DMatrix<f64>> {
    spec.validate(lap.dim())?;
    let w = spec.spectral_weights(lap.eigenvalues());
    Ok(spectral_matrix(lap.eigenvectors(), &w))
}

/// Analytic `∂K/∂θ` for one learnable hyperparameter.
pub fn kernel_grad(lap: &ScaledLaplacian, spec: &KernelSpec, hyper: Hyperparameter) -> Result<DMatrix<f64>> {
    spec.validate(lap.dim())?;
    let dw = spec.spectral_weight_grad(lap.eigenvalues(), hyper)?;
    Ok(spectral_matrix(lap.eigenvectors(), &dw))
}

/// Kernel order for the polynomial pair: `min(5, diameter)`, at least 1.
pub fn default_eta(egonet: &EgoNet) -> usize {
    // ego-nets are connected by construction
    diameter(egonet.adjacency()).unwrap_or(1).clamp(1, 5)
}
