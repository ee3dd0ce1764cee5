use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::baselines::SearchMethod;
use crate::engine::BoConfig;
use crate::graph::{gen_ba, gen_grid2d, gen_ws, load_edge_list_file, AdjacencyGraph, Grid2d};
use crate::spectral::KernelFamily;
use crate::tasks::{
    ackley, betweenness, degree_values, eigenvector_centrality, grid_function_values, patient_zero_values, rosenbrock,
    sir_simulate, team_generate, Direction, GridBox, SirParams, TabulatedObjective, TeamConfig,
};
use crate::{Error, Result};

/// Where the graph comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    Ba {
        n: usize,
        m: usize,
        #[serde(default)]
        seed: u64,
    },
    Ws {
        n: usize,
        k: usize,
        beta: f64,
        #[serde(default)]
        seed: u64,
    },
    Grid {
        side: usize,
    },
    /// Whitespace-separated edge list; relative paths resolve against the
    /// config file's directory.
    EdgeList {
        path: PathBuf,
    },
}

impl GraphSpec {
    /// The same generator with its seed shifted by `k`; fixed graphs are returned unchanged.
    pub fn reseeded(&self, k: u64) -> GraphSpec {
        let mut g = self.clone();
        match &mut g {
            GraphSpec::Ba { seed, .. } | GraphSpec::Ws { seed, .. } => *seed = seed.wrapping_add(k),
            GraphSpec::Grid { .. } | GraphSpec::EdgeList { .. } => {}
        }
        g
    }

    pub fn build(&self, base_dir: &Path) -> Result<AdjacencyGraph> {
        match self {
            GraphSpec::Ba { n, m, seed } => gen_ba(*n, *m, *seed),
            GraphSpec::Ws { n, k, beta, seed } => gen_ws(*n, *k, *beta, *seed),
            GraphSpec::Grid { side } => Ok(gen_grid2d(*side)?.0),
            GraphSpec::EdgeList { path } => {
                let p = if path.is_absolute() { path.clone() } else { base_dir.join(path) };
                load_edge_list_file(&p)
            }
        }
    }
}

/// The objective family and its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskSpec {
    Betweenness {
        #[serde(default)]
        noise_sd: f64,
    },
    EigenvectorCentrality {
        #[serde(default)]
        noise_sd: f64,
    },
    /// Degree as an influence proxy.
    Degree {
        #[serde(default)]
        noise_sd: f64,
    },
    Ackley {
        #[serde(default)]
        noise_sd: f64,
        #[serde(default = "ackley_box")]
        domain: GridBox,
    },
    Rosenbrock {
        #[serde(default)]
        noise_sd: f64,
        #[serde(default = "rosenbrock_box")]
        domain: GridBox,
    },
    PatientZero {
        #[serde(default)]
        noise_sd: f64,
        sir: SirParams,
    },
    /// Builds its own team graph; the experiment must not name a graph.
    Team {
        #[serde(default)]
        noise_sd: f64,
        team: TeamConfig,
    },
}

fn ackley_box() -> GridBox {
    GridBox::ACKLEY
}
fn rosenbrock_box() -> GridBox {
    GridBox::ROSENBROCK
}

impl TaskSpec {
    pub fn name(&self) -> &'static str {
        match self {
            TaskSpec::Betweenness { .. } => "betweenness",
            TaskSpec::EigenvectorCentrality { .. } => "eigenvector_centrality",
            TaskSpec::Degree { .. } => "degree",
            TaskSpec::Ackley { .. } => "ackley",
            TaskSpec::Rosenbrock { .. } => "rosenbrock",
            TaskSpec::PatientZero { .. } => "patient_zero",
            TaskSpec::Team { .. } => "team",
        }
    }

    fn noise_sd(&self) -> f64 {
        match self {
            TaskSpec::Betweenness { noise_sd }
            | TaskSpec::EigenvectorCentrality { noise_sd }
            | TaskSpec::Degree { noise_sd }
            | TaskSpec::Ackley { noise_sd, .. }
            | TaskSpec::Rosenbrock { noise_sd, .. }
            | TaskSpec::PatientZero { noise_sd, .. }
            | TaskSpec::Team { noise_sd, .. } => *noise_sd,
        }
    }
}

/// A constructed benchmark: graph plus objective.
#[derive(Clone, Debug)]
pub struct TaskInstance {
    pub graph: AdjacencyGraph,
    pub objective: TabulatedObjective,
}

/// Builds the graph and the objective table for `task`.
pub fn build_task(task: &TaskSpec, graph: Option<&GraphSpec>, base_dir: &Path) -> Result<TaskInstance> {
    if !(task.noise_sd() >= 0.0) {
        return Err(Error::Config("noise_sd must be nonnegative".into()));
    }
    let need_graph = || {
        graph
            .ok_or_else(|| Error::Config(format!("task `{}` needs a [graph] section", task.name())))
            .and_then(|g| g.build(base_dir))
            .map_err(|e| e.context("building graph"))
    };
    let grid_of = |g: &AdjacencyGraph| -> Result<Grid2d> {
        match graph {
            Some(GraphSpec::Grid { side }) if side * side == g.node_count() => Ok(Grid2d { side: *side }),
            _ => Err(Error::Config(format!("task `{}` needs a grid graph", task.name()))),
        }
    };
    let (graph, values, direction) = match task {
        TaskSpec::Betweenness { .. } => {
            let g = need_graph()?;
            let v = betweenness(&g);
            (g, v, Direction::Maximize)
        }
        TaskSpec::EigenvectorCentrality { .. } => {
            let g = need_graph()?;
            let v = eigenvector_centrality(&g)?;
            (g, v, Direction::Maximize)
        }
        TaskSpec::Degree { .. } => {
            let g = need_graph()?;
            let v = degree_values(&g);
            (g, v, Direction::Maximize)
        }
        TaskSpec::Ackley { domain, .. } => {
            let g = need_graph()?;
            let v = grid_function_values(grid_of(&g)?, *domain, ackley)?;
            (g, v, Direction::Minimize)
        }
        TaskSpec::Rosenbrock { domain, .. } => {
            let g = need_graph()?;
            let v = grid_function_values(grid_of(&g)?, *domain, rosenbrock)?;
            (g, v, Direction::Minimize)
        }
        TaskSpec::PatientZero { sir, .. } => {
            let g = need_graph()?;
            let tau = sir_simulate(&g, sir)?;
            (g, patient_zero_values(&tau, sir.horizon), Direction::Maximize)
        }
        TaskSpec::Team { team, .. } => {
            if graph.is_some() {
                return Err(Error::Config("the team task generates its own graph; remove [graph]".into()));
            }
            let inst = team_generate(team)?;
            let obj = inst.objective();
            (inst.graph, obj.values().to_vec(), Direction::Maximize)
        }
    };
    let objective = TabulatedObjective::new(values, direction)?.with_noise(task.noise_sd());
    Ok(TaskInstance { graph, objective })
}

/// A method tag: `bo-<kernel>` (alias `bayesoptg-<kernel>`) or a baseline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MethodSpec {
    Bo(KernelFamily),
    Search(SearchMethod),
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodSpec::Bo(k) => write!(f, "bo-{k}"),
            MethodSpec::Search(m) => write!(f, "{m}"),
        }
    }
}

impl FromStr for MethodSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let kernel = s.strip_prefix("bo-").or_else(|| s.strip_prefix("bayesoptg-"));
        if let Some(k) = kernel {
            return k
                .parse::<KernelFamily>()
                .map(MethodSpec::Bo)
                .map_err(|_| Error::Config(format!("unknown method tag `{s}`: no kernel named `{k}`")));
        }
        s.parse::<SearchMethod>()
            .map(MethodSpec::Search)
            .map_err(|_| Error::Config(format!("unknown method tag `{s}`")))
    }
}

impl Serialize for MethodSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MethodSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Seed indices: a count `n` meaning `0..n`, or an explicit list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    Count(usize),
    List(Vec<u64>),
}

impl Seeds {
    pub fn indices(&self) -> Vec<u64> {
        match self {
            Seeds::Count(n) => (0..*n as u64).collect(),
            Seeds::List(v) => v.clone(),
        }
    }
}

/// One experiment grid: every method crossed with every seed on one task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub task: TaskSpec,
    #[serde(default)]
    pub graph: Option<GraphSpec>,
    pub methods: Vec<MethodSpec>,
    pub budget: usize,
    pub seeds: Seeds,
    #[serde(default)]
    pub master_seed: u64,
    /// Optimiser settings for every `bo-*` method. `budget` and `seed` here
    /// are ignored in favour of the experiment-level values.
    #[serde(default)]
    pub bo: BoConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Fill the `wall_ms` column. Off by default so outputs are reproducible
    /// byte for byte.
    #[serde(default)]
    pub record_wall_time: bool,
}

fn default_name() -> String {
    "experiment".into()
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| e.context(path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method is required".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for m in &self.methods {
            if !seen.insert(*m) {
                return Err(Error::Config(format!("method `{m}` listed twice")));
            }
        }
        let seeds = self.seeds.indices();
        if seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        if seeds.iter().collect::<std::collections::HashSet<_>>().len() != seeds.len() {
            return Err(Error::Config("seed list contains duplicates".into()));
        }
        if self.budget < 1 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        if self.methods.iter().any(|m| matches!(m, MethodSpec::Bo(_))) {
            self.bo_config(0, KernelFamily::Diffusion).validate()?;
        }
        Ok(())
    }

    /// Optimiser settings for one cell.
    pub fn bo_config(&self, seed: u64, kernel: KernelFamily) -> BoConfig {
        BoConfig { budget: self.budget, seed, kernel, ..self.bo.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
        name = "t"
        methods = ["bo-diffusion", "bayesoptg-sum_inverse", "random", "bfs"]
        budget = 20
        seeds = 3
        [graph]
        kind = "ba"
        n = 50
        m = 2
        [task]
        kind = "eigenvector_centrality"
        [bo]
        n0 = 5
        [bo.trust_region]
        q0 = 30
    "#;

    #[test]
    fn parses_basic_config() {
        let c = ExperimentConfig::from_toml(BASIC).unwrap();
        assert_eq!(c.methods[1], MethodSpec::Bo(KernelFamily::SumInverse));
        assert_eq!(c.methods[1].to_string(), "bo-sum_inverse");
        assert_eq!(c.seeds.indices(), vec![0, 1, 2]);
        assert_eq!(c.bo.n0, 5);
        assert_eq!(c.bo.trust_region.q0, 30);
        assert_eq!(c.bo.trust_region.fail_tol, 10);
        let inst = build_task(&c.task, c.graph.as_ref(), Path::new(".")).unwrap();
        assert_eq!(inst.graph.node_count(), 50);
    }

    #[test]
    fn unknown_method_names_the_tag() {
        let bad = BASIC.replace("\"bfs\"", "\"annealing\"");
        let err = ExperimentConfig::from_toml(&bad).unwrap_err().to_string();
        assert!(err.contains("annealing"), "{err}");
        let bad = BASIC.replace("bo-diffusion", "bo-heat");
        assert!(ExperimentConfig::from_toml(&bad).unwrap_err().to_string().contains("bo-heat"));
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = BASIC.replace("budget = 20", "budget = 20\nbugdet = 3");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        let bad = BASIC.replace("q0 = 30", "q_zero = 30");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn invalid_grids_rejected() {
        let bad = BASIC.replace("seeds = 3", "seeds = []");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        let bad = BASIC.replace("n0 = 5", "n0 = 50");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn task_graph_compatibility() {
        let ackley = TaskSpec::Ackley { noise_sd: 0.0, domain: GridBox::ACKLEY };
        assert!(build_task(&ackley, Some(&GraphSpec::Ba { n: 20, m: 1, seed: 0 }), Path::new(".")).is_err());
        let inst = build_task(&ackley, Some(&GraphSpec::Grid { side: 21 }), Path::new(".")).unwrap();
        assert_eq!(inst.objective.optimum(), Some(inst.objective.values()[220]));
        let team = TaskSpec::Team { noise_sd: 0.0, team: TeamConfig::new(3, 1.0, 0) };
        assert!(build_task(&team, Some(&GraphSpec::Grid { side: 3 }), Path::new(".")).is_err());
        assert_eq!(build_task(&team, None, Path::new(".")).unwrap().graph.node_count(), 500);
        assert!(build_task(&TaskSpec::Degree { noise_sd: 0.0 }, None, Path::new(".")).is_err());
    }

    #[test]
    fn edge_list_resolves_relative_to_config() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("tri.txt"), "0 1\n1 2\n2 0\n").unwrap();
        let spec = GraphSpec::EdgeList { path: "tri.txt".into() };
        let inst = build_task(&TaskSpec::Degree { noise_sd: 0.0 }, Some(&spec), dir.path()).unwrap();
        assert!(inst.objective.values().iter().all(|&d| d == 2.0));
    }

    use crate::tasks::Objective;
}
