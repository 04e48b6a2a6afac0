//! Simulation harness: adaptive multi-batch runs against a known ground
//! truth, result aggregation and file output, and fixed demo scenarios.

mod config;
mod demos;
mod output;
mod run;

pub use config::{BudgetSpec, ExperimentConfig, GraphSpec, LearnerKind, Strategy};
pub use run::{
    draw_truth, make_learner, multi_mec_candidates, sign_test, quantile, run_experiment, run_replicate, run_with_truth, summarize,
    ExperimentOutput, ReplicateResult, SummaryRow, Truth, MAX_TRUTH_ATTEMPTS,
};
pub use demos::{
    bisection_demo, boxplot_config, chain_dag, consistency_config, counterexample_dag, counterexample_repro,
    er_curves_config, meek_plateau_config, runtime_probe, symbolic_run, CounterexampleReport, ProbeRow,
    SymbolicBatch, SymbolicUtility, TIE_TOLERANCE,
};
pub use output::{
    compact_design, write_outputs, write_results_csv, write_truth_mass_csv, CONFIG_FILE, RESULTS_FILE, SUMMARY_FILE,
    TRUTH_MASS_FILE,
};
