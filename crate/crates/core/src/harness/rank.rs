use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::experiment::ExperimentSummary;
use super::stats::{aggregate_ranks, TaskCurves};
use crate::{Error, Result};

/// Aggregated ranks over every `summary.json` below a directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    /// Summaries that contributed, as paths relative to the scanned root.
    pub sources: Vec<PathBuf>,
    pub ranks: BTreeMap<String, Vec<f64>>,
}

fn find_summaries(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>()?;
    entries.sort();
    for p in entries {
        if p.is_dir() {
            find_summaries(&p, out)?;
        } else if p.file_name().is_some_and(|n| n == "summary.json") {
            out.push(p);
        }
    }
    Ok(())
}

/// Reads every experiment summary below `dir` and ranks methods by mean
/// regret, one task per summary. Methods without a regret curve (all cells
/// failed) are skipped.
pub fn rank_results_dir(dir: &Path) -> Result<RankReport> {
    let mut paths = Vec::new();
    find_summaries(dir, &mut paths)?;
    if paths.is_empty() {
        return Err(Error::Input(format!("no summary.json found below {}", dir.display())));
    }
    let mut tasks: Vec<TaskCurves> = Vec::new();
    let mut sources = Vec::new();
    for p in paths {
        let bytes = std::fs::read(&p)?;
        let summary: ExperimentSummary =
            serde_json::from_slice(&bytes).map_err(|e| Error::Input(format!("{}: {e}", p.display())))?;
        let curves: TaskCurves = summary
            .methods
            .into_iter()
            .filter(|m| !m.mean_regret.is_empty())
            .map(|m| (m.method, m.mean_regret))
            .collect();
        if !curves.is_empty() {
            tasks.push(curves);
            sources.push(p.strip_prefix(dir).unwrap_or(&p).to_path_buf());
        }
    }
    let ranks = aggregate_ranks(&tasks)?;
    Ok(RankReport { sources, ranks })
}

/// Writes `ranks.json` and `ranks.csv` (one column per method) into `out`.
pub fn write_rank_report(out: &Path, report: &RankReport) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let f = std::fs::File::create(out.join("ranks.json"))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(f), report)?;
    let mut w = csv::Writer::from_path(out.join("ranks.csv"))?;
    let mut header = vec!["iteration".to_string()];
    header.extend(report.ranks.keys().cloned());
    w.write_record(&header)?;
    let len = report.ranks.values().map(Vec::len).min().unwrap_or(0);
    for i in 0..len {
        let mut row = vec![(i + 1).to_string()];
        row.extend(report.ranks.values().map(|v| v[i].to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::experiment::{run_experiment, RunOptions};
    use super::super::ExperimentConfig;
    use super::*;

    fn config(task: &str, out: &Path) -> ExperimentConfig {
        ExperimentConfig::from_toml(&format!(
            r#"
            methods = ["random", "bfs", "dfs"]
            budget = 20
            seeds = 2
            output_dir = "{}"
            [graph]
            kind = "ba"
            n = 80
            m = 2
            [task]
            kind = "{task}"
            "#,
            out.display()
        ))
        .unwrap()
    }

    #[test]
    fn ranks_lie_in_range() {
        let root = tempfile::tempdir().unwrap();
        for task in ["degree", "betweenness"] {
            run_experiment(&config(task, &root.path().join(task)), &RunOptions::default()).unwrap();
        }
        let r = rank_results_dir(root.path()).unwrap();
        assert_eq!(r.sources.len(), 2);
        assert_eq!(r.ranks.len(), 3);
        for v in r.ranks.values() {
            assert_eq!(v.len(), 20);
            assert!(v.iter().all(|&x| (1.0..=3.0).contains(&x)));
        }
        for i in 0..20 {
            let total: f64 = r.ranks.values().map(|v| v[i]).sum();
            assert!((total - 6.0).abs() < 1e-12);
        }
        let out = root.path().join("ranked");
        write_rank_report(&out, &r).unwrap();
        let csv = std::fs::read_to_string(out.join("ranks.csv")).unwrap();
        assert_eq!(csv.lines().next().unwrap(), "iteration,bfs,dfs,random");
        assert_eq!(csv.lines().count(), 21);
    }

    #[test]
    fn empty_directory_is_an_error() {
        let root = tempfile::tempdir().unwrap();
        assert!(rank_results_dir(root.path()).is_err());
    }
}
