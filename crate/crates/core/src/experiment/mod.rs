//! Experiment orchestration: configuration, evaluation over the budget grid,
//! and report files.

mod config;
mod report;
mod run;

pub use config::{Algorithm, DatasetSpec, DerivedSeeds, ExperimentConfig, DEFAULT_BUDGETS};
pub use report::{
    emit_report, summarize, write_results, write_summary, write_timing, RunMeta, SummaryRow,
    RESULTS_HEADER,
};
pub use run::{
    build_pool, evaluate_pool, load_source_graph, prepare_agent, run_experiment, select_seeds,
    sort_results, AgentSource, ExperimentResult, PreparedAgent,
};
