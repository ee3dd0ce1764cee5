//! Drives the `graph-bo` binary.

use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_graph-bo"))
}

const CONFIG: &str = r#"
name = "cli"
methods = ["bo-sum_inverse", "dfs"]
budget = 15
seeds = 2
graph = { kind = "ws", n = 60, k = 4, beta = 0.2, seed = 1 }
task = { kind = "betweenness" }
"#;

#[test]
fn run_then_rank() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("exp.toml");
    fs::write(&cfg, CONFIG).unwrap();
    let out = tmp.path().join("results/cli");
    let status = bin().args(["--seed", "5", "--jobs", "2", "--out"]).arg(&out).arg("run").arg(&cfg).status().unwrap();
    assert!(status.success());
    assert!(out.join("summary.json").is_file());
    assert!(out.join("cells/dfs/seed_1.csv").is_file());

    let ranked = bin().arg("rank").arg(tmp.path().join("results")).output().unwrap();
    assert!(ranked.status.success(), "{}", String::from_utf8_lossy(&ranked.stderr));
    assert!(tmp.path().join("results/ranks.csv").is_file());
}

#[test]
fn validate_kernels_writes_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("kv.toml");
    fs::write(&cfg, "kernels = [\"diffusion\"]\nseeds = 2\n[graph]\nkind = \"ba\"\nn = 60\nm = 1\n").unwrap();
    let out = tmp.path().join("kv");
    let o = bin().arg("--out").arg(&out).arg("validate-kernels").arg(&cfg).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("diffusion"));
    for f in ["kernel_validation.json", "rho.csv", "curves.csv"] {
        assert!(out.join(f).is_file(), "{f}");
    }
}

#[test]
fn errors_exit_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = bin().arg("run").arg(tmp.path().join("nope.toml")).output().unwrap();
    assert!(!missing.status.success());

    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, CONFIG.replace("\"dfs\"", "\"simulated-annealing\"")).unwrap();
    let o = bin().arg("run").arg(&bad).output().unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("simulated-annealing"));

    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    assert!(!bin().arg("rank").arg(&empty).status().unwrap().success());
}
