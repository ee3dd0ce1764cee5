//! Expected improvement, enumerated over every unvisited node of the ego-net.
//!
//! Acquisition always minimises; maximisation tasks are negated upstream.

use std::collections::HashSet;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use statrs::function::erf::erfc;

use crate::gp::GpModel;
use crate::graph::{EgoNet, NodeId};
use crate::Result;

/// Relative gap below which two EI values count as tied.
const TIE_TOL: f64 = 1e-12;

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// `E[max(y* − Y, 0)]` for `Y ~ N(mu, sigma²)`.
pub fn expected_improvement(mu: f64, sigma: f64, y_star: f64) -> f64 {
    let gap = y_star - mu;
    if !(sigma > 0.0) {
        return gap.max(0.0);
    }
    let z = gap / sigma;
    (gap * std_normal_cdf(z) + sigma * std_normal_pdf(z)).max(0.0)
}

#[derive(Clone, Debug)]
pub struct AcquisitionResult {
    pub chosen: NodeId,
    /// `(candidate, EI)` for every scored candidate, in ego-net order.
    pub scores: Vec<(NodeId, f64)>,
    pub incumbent: f64,
}

/// Scores every ego-net node outside `visited` and returns the EI maximiser,
/// breaking ties towards the smallest global id. `None` when every ego-net
/// node has been visited.
pub fn select_next(
    model: &GpModel,
    egonet: &EgoNet,
    visited: &HashSet<NodeId>,
    y_star: f64,
) -> Result<Option<AcquisitionResult>> {
    let candidates: Vec<usize> = (0..egonet.len()).filter(|&i| !visited.contains(&egonet.global(i))).collect();
    if candidates.is_empty() {
        return Ok(None);
    }
    let (mu, var) = model.predict(&candidates)?;
    let scores: Vec<(NodeId, f64)> = candidates
        .iter()
        .zip(mu.iter().zip(&var))
        .map(|(&i, (&m, &v))| (egonet.global(i), expected_improvement(m, v.sqrt(), y_star)))
        .collect();
    let chosen = scores
        .iter()
        .copied()
        .reduce(|best, cand| {
            let tol = TIE_TOL * cand.1.abs().max(best.1.abs());
            if cand.1 > best.1 + tol || ((cand.1 - best.1).abs() <= tol && cand.0 < best.0) {
                cand
            } else {
                best
            }
        })
        .map(|(v, _)| v)
        .expect("candidates are non-empty");
    Ok(Some(AcquisitionResult { chosen, scores, incumbent: y_star }))
}
