use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::{Direction, TabulatedObjective};
use crate::graph::AdjacencyGraph;
use crate::{Error, Result};

/// Edge rule between teams: Jaccard index strictly above the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    Fixed(f64),
    /// Median Jaccard index over all team pairs.
    Median,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TeamConfig {
    #[serde(default = "default_pool")]
    pub pool_size: usize,
    pub skills: usize,
    pub alpha: f64,
    #[serde(default = "default_team_count")]
    pub team_count: usize,
    #[serde(default = "default_min_size")]
    pub min_team_size: usize,
    /// Defaults to `2 · skills`.
    #[serde(default)]
    pub max_team_size: Option<usize>,
    #[serde(default = "default_threshold")]
    pub threshold: Threshold,
    #[serde(default)]
    pub seed: u64,
}

fn default_pool() -> usize {
    20
}
fn default_team_count() -> usize {
    500
}
fn default_min_size() -> usize {
    2
}
fn default_threshold() -> Threshold {
    Threshold::Fixed(0.3)
}

impl TeamConfig {
    pub fn new(skills: usize, alpha: f64, seed: u64) -> Self {
        Self {
            pool_size: default_pool(),
            skills,
            alpha,
            team_count: default_team_count(),
            min_team_size: default_min_size(),
            max_team_size: None,
            threshold: default_threshold(),
            seed,
        }
    }

    fn size_range(&self) -> (usize, usize) {
        let hi = self.max_team_size.unwrap_or(2 * self.skills).min(self.pool_size);
        (self.min_team_size, hi)
    }

    pub fn validate(&self) -> Result<()> {
        if self.skills < 2 {
            return Err(Error::Config("team task needs at least 2 skills".into()));
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::Config("Dirichlet concentration must be positive".into()));
        }
        if self.team_count < 2 {
            return Err(Error::Config("team task needs at least 2 teams".into()));
        }
        let (lo, hi) = self.size_range();
        if lo < 1 || lo > hi {
            return Err(Error::Config(format!("empty team-size range [{lo}, {hi}] for pool {}", self.pool_size)));
        }
        if let Threshold::Fixed(t) = self.threshold {
            if !(0.0..1.0).contains(&t) {
                return Err(Error::Config(format!("Jaccard threshold must lie in [0, 1), got {t}")));
            }
        }
        Ok(())
    }
}

/// Generated team graph with the data the objective needs.
#[derive(Clone, Debug)]
pub struct TeamInstance {
    pub graph: AdjacencyGraph,
    /// Sorted member ids per team; team `i` is node `i`.
    pub teams: Vec<Vec<usize>>,
    /// Skill distribution per individual.
    pub skills: Vec<Vec<f64>>,
    /// Threshold actually applied (resolved when median mode is used).
    pub threshold: f64,
}

impl TeamInstance {
    pub fn objective(&self) -> TabulatedObjective {
        let values = self.teams.iter().map(|t| team_objective(t, &self.skills)).collect();
        TabulatedObjective::new(values, Direction::Maximize).expect("team count is at least 2")
    }
}

pub fn jaccard(a: &[usize], b: &[usize]) -> f64 {
    // inputs are sorted and duplicate free
    let (mut i, mut j, mut inter) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

fn dirichlet<R: Rng + ?Sized>(k: usize, alpha: f64, rng: &mut R) -> Vec<f64> {
    let gamma = Gamma::new(alpha, 1.0).expect("alpha validated");
    let mut x: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
    let sum: f64 = x.iter().sum();
    if sum > 0.0 {
        x.iter_mut().for_each(|v| *v /= sum);
    } else {
        // every variate underflowed (tiny alpha): the limit is a one-hot vector
        x.fill(0.0);
        x[rng.random_range(0..k)] = 1.0;
    }
    x
}

pub fn team_generate(config: &TeamConfig) -> Result<TeamInstance> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let skills: Vec<Vec<f64>> =
        (0..config.pool_size).map(|_| dirichlet(config.skills, config.alpha, &mut rng)).collect();
    let (lo, hi) = config.size_range();
    let teams: Vec<Vec<usize>> = (0..config.team_count)
        .map(|_| {
            let size = rng.random_range(lo..=hi);
            let mut members = rand::seq::index::sample(&mut rng, config.pool_size, size).into_vec();
            members.sort_unstable();
            members
        })
        .collect();

    let m = teams.len();
    let mut weights = Vec::with_capacity(m * (m - 1) / 2);
    for a in 0..m {
        for b in (a + 1)..m {
            weights.push(jaccard(&teams[a], &teams[b]));
        }
    }
    let threshold = match config.threshold {
        Threshold::Fixed(t) => t,
        Threshold::Median => {
            let mut w = weights.clone();
            w.sort_by(|x, y| x.total_cmp(y));
            let mid = w.len() / 2;
            if w.len() % 2 == 0 {
                0.5 * (w[mid - 1] + w[mid])
            } else {
                w[mid]
            }
        }
    };
    let mut edges = Vec::new();
    let mut k = 0;
    for a in 0..m {
        for b in (a + 1)..m {
            if weights[k] > threshold {
                edges.push((a, b));
            }
            k += 1;
        }
    }
    if edges.is_empty() {
        return Err(Error::Graph(format!(
            "no team pair has Jaccard index above {threshold}; lower the threshold or enlarge teams"
        )));
    }
    let graph = AdjacencyGraph::from_edges(m, edges)?;
    Ok(TeamInstance { graph, teams, skills, threshold })
}

fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

/// Entropy of the team's mean skill vector minus the mean member entropy.
pub fn team_objective(members: &[usize], skills: &[Vec<f64>]) -> f64 {
    if members.is_empty() {
        return 0.0;
    }
    let k = skills[members[0]].len();
    let inv = 1.0 / members.len() as f64;
    let mut mean = vec![0.0; k];
    let mut mean_h = 0.0;
    for &i in members {
        for (m, x) in mean.iter_mut().zip(&skills[i]) {
            *m += x * inv;
        }
        mean_h += entropy(&skills[i]) * inv;
    }
    // concavity guarantees a nonnegative gap; clamp roundoff
    (entropy(&mean) - mean_h).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn jaccard_cases() {
        assert_eq!(jaccard(&[1, 2, 3], &[1, 2, 3]), 1.0);
        assert_eq!(jaccard(&[1, 2], &[3, 4]), 0.0);
        assert_eq!(jaccard(&[1, 2, 3], &[2, 3, 4]), 0.5);
    }

    #[test]
    fn objective_hand_cases() {
        let skills = vec![vec![0.5, 0.5], vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]];
        let oracle = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln()) - 0.5 * 2f64.ln();
        assert_abs_diff_eq!(team_objective(&[0, 1], &skills), oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(team_objective(&[0, 1], &skills), 0.2158, epsilon = 1e-4);
        assert_abs_diff_eq!(team_objective(&[0, 3], &skills), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(team_objective(&[1, 2], &skills), 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn generation_is_deterministic_and_respects_threshold() {
        let cfg = TeamConfig { team_count: 120, ..TeamConfig::new(3, 1.0, 7) };
        let a = team_generate(&cfg).unwrap();
        let b = team_generate(&cfg).unwrap();
        assert_eq!(a.teams, b.teams);
        assert_eq!(a.graph, b.graph);
        for x in 0..a.teams.len() {
            for y in (x + 1)..a.teams.len() {
                let w = jaccard(&a.teams[x], &a.teams[y]);
                assert_eq!(a.graph.has_edge(x.into(), y.into()), w > 0.3);
            }
        }
        for t in &a.teams {
            assert!(t.len() >= 2 && t.len() <= 6);
            assert!(t.windows(2).all(|w| w[0] < w[1]));
        }
        for s in &a.skills {
            assert_abs_diff_eq!(s.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn median_mode_and_empty_graph_error() {
        let cfg = TeamConfig { team_count: 60, threshold: Threshold::Median, ..TeamConfig::new(2, 10.0, 1) };
        let inst = team_generate(&cfg).unwrap();
        assert!(inst.graph.edge_count() > 0);
        // single-member teams from a large pool rarely overlap, and never above 0.99
        let cfg = TeamConfig {
            pool_size: 1000,
            min_team_size: 1,
            max_team_size: Some(1),
            team_count: 10,
            threshold: Threshold::Fixed(0.99),
            ..TeamConfig::new(2, 1.0, 0)
        };
        assert!(matches!(team_generate(&cfg), Err(Error::Graph(_))));
    }

    #[test]
    fn config_validation() {
        assert!(TeamConfig::new(1, 1.0, 0).validate().is_err());
        assert!(TeamConfig::new(2, 0.0, 0).validate().is_err());
        assert!(TeamConfig { threshold: Threshold::Fixed(1.0), ..TeamConfig::new(2, 1.0, 0) }.validate().is_err());
    }

    proptest! {
        #[test]
        fn objective_within_zero_and_ln_k(seed in 0u64..500, k in 2usize..6, alpha in 0.05f64..20.0, size in 1usize..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let skills: Vec<Vec<f64>> = (0..size).map(|_| dirichlet(k, alpha, &mut rng)).collect();
            let members: Vec<usize> = (0..size).collect();
            let f = team_objective(&members, &skills);
            prop_assert!(f >= 0.0);
            prop_assert!(f <= (k as f64).ln() + 1e-12);
        }
    }
}
