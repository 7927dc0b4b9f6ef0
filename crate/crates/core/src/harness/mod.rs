//! Built-in settings, experiment runs, reference tables and file output.

mod experiment;
mod export;
mod settings;
mod tables;

pub use experiment::{
    mean_std, run_experiment, run_replication, CellStat, ExperimentSpec, ExperimentSummary,
    LearnerSpec, LearnerSummary, MeanTrajectory, Replication,
};
pub use export::{
    comparison_csv, csv_field, export, export_comparison, mean_trajectory_csv, summary_csv,
    trajectory_csv, ExportOptions, COMPARISON_HEADER, MEAN_TRAJECTORY_HEADER, SUMMARY_HEADER,
    TRAJECTORY_HEADER,
};
pub use settings::{builtin_setting, SETTINGS};
pub use tables::{
    compare, pf_lex_gap_free, table3_learners, table3_reference, table5_learners, table5_reference,
    CellReport, ReferenceCell, ReproTable, Tolerance, REFERENCE_HORIZON, REFERENCE_REPLICATIONS,
};
