//! Experiment orchestration: cohorts, Monte-Carlo datasets, per-radio model
//! training, trial evaluation, SNR sweeps and report files.
//!
//! Realizations `0..n_z` of every radio are training data; realizations
//! `n_z..n_z + eval_realizations` are held out for evaluation.

mod cohort;
mod config;
mod dataset;
mod evaluate;
mod report;
mod train;
mod trial;

pub use cohort::{default_cohort, read_cohort, synthesize_cohort, write_cohort, Cohort, CohortManifest};
pub use config::{ExperimentConfig, PipelineSpec};
pub use dataset::{generate_dataset, FingerprintStore, StoreView};
pub use evaluate::{
    evaluate_trial, run_trial, snr_sweep, AttackOutcome, ClaimReport, SelectionSummary,
    VerificationReport,
};
pub use report::{emit_report, read_report_json, report_rows, ReportFiles};
pub use train::{assemble_training, fit_transform, train_best_model, train_with_transform, ModelSelection, TrainingData};
pub use trial::TrialConfig;
