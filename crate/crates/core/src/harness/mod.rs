//! Multi-seed experiments over the model axis {GCN, GCN+focal,
//! GCN+class-balanced focal, AdaGCN}.
//!
//! Each seed fixes the majority class, the imbalanced split and the feature
//! perturbation through separate derived streams, so every model on the axis
//! sees the same data for a given seed. Trials run independently (optionally
//! in parallel) and are reported in (seed, sweep point, model) order.

mod metrics;
pub mod report;
mod spec;
mod trials;

pub use metrics::{evaluate, Metrics};
pub use spec::{ExperimentSpec, ModelKind, ModelSpec, Preprocess, SplitProtocol, SweepSpec};
pub use trials::{
    export_weight_traces, majority_class_for, mean_std, run_experiment, run_trial, run_trials,
    split_for, sweep_estimators, sweep_feature_noise, sweep_minority_count, trial_features,
    ExperimentResult, SummaryRow, SweepSummary, TraceRow, TrainedModel, TrialFailure, TrialOutcome,
    TrialPoint, TrialReport,
};
