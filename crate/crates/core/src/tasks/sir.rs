use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{AdjacencyGraph, NodeId};
use crate::{Error, Result};

/// Discrete-time SIR process with spontaneous infection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SirParams {
    /// Per-contact infection probability.
    pub beta: f64,
    /// Recovery probability per step.
    pub gamma: f64,
    /// Spontaneous infection probability per step.
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    pub initial_fraction: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_horizon() -> usize {
    20
}

impl SirParams {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("beta", self.beta), ("gamma", self.gamma), ("epsilon", self.epsilon)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("SIR {name} must lie in [0, 1], got {p}")));
            }
        }
        if !(0.0..=1.0).contains(&self.initial_fraction) {
            return Err(Error::Config("SIR initial fraction must lie in [0, 1]".into()));
        }
        if self.horizon < 1 {
            return Err(Error::Config("SIR horizon must be at least 1".into()));
        }
        Ok(())
    }

    /// `max(1, round(fraction · n))`.
    pub fn initial_count(&self, n: usize) -> usize {
        ((self.initial_fraction * n as f64).round() as usize).clamp(1, n.max(1))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    S,
    I,
    R,
}

/// First-infection time per node, `None` for nodes never infected. Sources
/// are drawn uniformly without replacement from the seed in `params`.
pub fn sir_simulate(g: &AdjacencyGraph, params: &SirParams) -> Result<Vec<Option<usize>>> {
    params.validate()?;
    let n = g.node_count();
    if n == 0 {
        return Err(Error::Graph("SIR on an empty graph".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let sources: Vec<NodeId> =
        rand::seq::index::sample(&mut rng, n, params.initial_count(n)).into_iter().map(NodeId::from).collect();
    sir_from_sources(g, params, &sources, &mut rng)
}

/// Runs the process from explicit sources, infected at time 0.
pub fn sir_from_sources<R: Rng + ?Sized>(
    g: &AdjacencyGraph,
    params: &SirParams,
    sources: &[NodeId],
    rng: &mut R,
) -> Result<Vec<Option<usize>>> {
    params.validate()?;
    let n = g.node_count();
    let mut state = vec![State::S; n];
    let mut tau = vec![None; n];
    for &s in sources {
        if s.index() >= n {
            return Err(Error::Input(format!("SIR source {s} outside graph")));
        }
        state[s.index()] = State::I;
        tau[s.index()] = Some(0);
    }
    let mut next = state.clone();
    for t in 1..=params.horizon {
        for v in 0..n {
            next[v] = match state[v] {
                State::R => State::R,
                State::I => {
                    if rng.random_bool(params.gamma) {
                        State::R
                    } else {
                        State::I
                    }
                }
                State::S => {
                    let k = g.neighbors(v.into()).iter().filter(|w| state[w.index()] == State::I).count();
                    let stay = (1.0 - params.epsilon) * (1.0 - params.beta).powi(k as i32);
                    if rng.random_bool((1.0 - stay).clamp(0.0, 1.0)) {
                        tau[v] = Some(t);
                        State::I
                    } else {
                        State::S
                    }
                }
            };
        }
        std::mem::swap(&mut state, &mut next);
    }
    Ok(tau)
}

/// `(1 − τ/T)²` for infected nodes and 0 for nodes never infected.
pub fn patient_zero_values(tau: &[Option<usize>], horizon: usize) -> Vec<f64> {
    tau.iter()
        .map(|t| match t {
            None => 0.0,
            Some(t) => (1.0 - *t as f64 / horizon as f64).powi(2),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_graphs::*;

    fn params(beta: f64, gamma: f64, horizon: usize) -> SirParams {
        SirParams { beta, gamma, epsilon: 0.0, horizon, initial_fraction: 0.0, seed: 0 }
    }

    #[test]
    fn deterministic_wavefront_on_path() {
        let g = path(8);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tau = sir_from_sources(&g, &params(1.0, 0.0, 20), &[NodeId(2)], &mut rng).unwrap();
        let expect: Vec<Option<usize>> = (0..8usize).map(|v| Some(v.abs_diff(2))).collect();
        assert_eq!(tau, expect);
    }

    #[test]
    fn no_spread_without_transmission() {
        let g = cycle(10);
        let p = SirParams { initial_fraction: 0.2, seed: 9, ..params(0.0, 0.3, 15) };
        let tau = sir_simulate(&g, &p).unwrap();
        assert_eq!(tau.iter().filter(|t| t.is_some()).count(), 2);
        assert!(tau.iter().flatten().all(|&t| t == 0));
    }

    #[test]
    fn single_step_marginal_matches_bernoulli() {
        let g = star(5);
        let p = params(0.2, 0.0, 1);
        let trials = 10_000;
        let mut hits = 0;
        for seed in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tau = sir_from_sources(&g, &p, &[NodeId(0)], &mut rng).unwrap();
            hits += tau[1..].iter().filter(|t| **t == Some(1)).count();
        }
        let rate = hits as f64 / (5 * trials) as f64;
        let band = 3.0 * (0.2f64 * 0.8 / (5 * trials) as f64).sqrt();
        assert!((rate - 0.2).abs() < band.max(0.01), "rate {rate}");
    }

    #[test]
    fn spontaneous_marginal_with_two_infected_neighbours() {
        // centre of P3 with both ends infected: 1 − (1−ε)(1−β)²
        let g = path(3);
        let p = SirParams { epsilon: 0.1, ..params(0.3, 0.0, 1) };
        let expect = 1.0 - 0.9 * 0.7f64.powi(2);
        let trials = 20_000;
        let mut hits = 0;
        for seed in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tau = sir_from_sources(&g, &p, &[NodeId(0), NodeId(2)], &mut rng).unwrap();
            hits += (tau[1] == Some(1)) as usize;
        }
        let rate = hits as f64 / trials as f64;
        let band = 3.0 * (expect * (1.0 - expect) / trials as f64).sqrt();
        assert!((rate - expect).abs() < band, "rate {rate} expected {expect}");
    }

    #[test]
    fn recovered_nodes_never_reinfect() {
        // with gamma = 1 the source recovers at step 1, so nothing past hop 1 is reached
        let g = path(5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let tau = sir_from_sources(&g, &params(1.0, 1.0, 10), &[NodeId(0)], &mut rng).unwrap();
        assert_eq!(tau, vec![Some(0), Some(1), Some(2), Some(3), Some(4)]);
        let g = star(3);
        let tau = sir_from_sources(&g, &params(1.0, 1.0, 10), &[NodeId(1)], &mut rng).unwrap();
        assert_eq!(tau, vec![Some(1), Some(0), Some(2), Some(2)]);
    }

    #[test]
    fn deterministic_per_seed() {
        let g = crate::graph::gen_ws(100, 4, 0.2, 1).unwrap();
        let p = SirParams { initial_fraction: 0.03, seed: 5, ..params(0.3, 0.1, 20) };
        assert_eq!(sir_simulate(&g, &p).unwrap(), sir_simulate(&g, &p).unwrap());
        assert_eq!(p.initial_count(100), 3);
        assert_eq!(p.initial_count(10), 1);
    }

    #[test]
    fn patient_zero_values_cases() {
        assert_eq!(patient_zero_values(&[None, Some(0), Some(10)], 20), vec![0.0, 1.0, 0.25]);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(params(1.5, 0.0, 1).validate().is_err());
        assert!(params(0.5, 0.0, 0).validate().is_err());
    }
}
