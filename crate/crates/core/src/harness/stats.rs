use std::collections::BTreeMap;

use crate::{Error, Result};

/// Ranks starting at 1, tied values sharing their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0)
}

/// Spearman rank correlation. A constant input has no defined correlation
/// and yields 0.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Input("spearman needs two equal-length samples of at least 2".into()));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::Input("spearman input contains NaN".into()));
    }
    Ok(pearson(&average_ranks(x), &average_ranks(y)))
}

/// Mean and standard error of the mean; the error is `None` below two samples.
pub fn mean_stderr(x: &[f64]) -> (f64, Option<f64>) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (mean, None);
    }
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Some((var / n).sqrt()))
}

pub fn median(x: &[f64]) -> f64 {
    let mut v = x.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    }
}

/// Per-task mean-regret curves, keyed by method.
pub type TaskCurves = BTreeMap<String, Vec<f64>>;

/// At every evaluation index, ranks methods by mean regret within each task
/// (1 is best, ties averaged) and averages ranks over the tasks a method
/// appears in. Curves are truncated to the shortest length.
pub fn aggregate_ranks(tasks: &[TaskCurves]) -> Result<BTreeMap<String, Vec<f64>>> {
    let len = tasks
        .iter()
        .flat_map(|t| t.values().map(Vec::len))
        .min()
        .ok_or_else(|| Error::Input("no curves to rank".into()))?;
    let mut sums: BTreeMap<String, (Vec<f64>, usize)> = BTreeMap::new();
    for task in tasks {
        let names: Vec<&String> = task.keys().collect();
        for i in 0..len {
            let vals: Vec<f64> = names.iter().map(|m| task[*m][i]).collect();
            for (m, r) in names.iter().zip(average_ranks(&vals)) {
                let e = sums.entry((*m).clone()).or_insert_with(|| (vec![0.0; len], 0));
                e.0[i] += r;
            }
        }
        for m in names {
            sums.get_mut(m).expect("inserted above").1 += 1;
        }
    }
    Ok(sums.into_iter().map(|(m, (s, c))| (m, s.into_iter().map(|v| v / c as f64).collect())).collect())
}
