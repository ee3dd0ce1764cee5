//! Experiment configuration and execution, kernel validation, statistics and
//! rank aggregation.

mod config;
mod experiment;
mod kernel_validation;
mod rank;
mod stats;

pub use config::{build_task, ExperimentConfig, GraphSpec, MethodSpec, Seeds, TaskInstance, TaskSpec};
pub use experiment::{
    cell_path, cell_seed, run_experiment, write_cell_csv, CellFailure, ExperimentOutcome, ExperimentSummary,
    MethodSummary, RunOptions, TaskSummary, CSV_HEADER,
};
pub use kernel_validation::{
    kernel_validation, write_report, FamilyValidation, KernelValidationConfig, KernelValidationReport, CURVE_POINTS,
    MAX_NODES,
};
pub use rank::{rank_results_dir, write_rank_report, RankReport};
pub use stats::{aggregate_ranks, average_ranks, mean_stderr, median, spearman_rho, TaskCurves};
