//! Regression metrics and the k-fold evaluation harness.

mod cv;
mod metrics;

pub use cv::{
    aggregate, cross_validate, evaluate_holdout, evaluate_in_training, CvReport, HoldoutReport,
    HoldoutRow,
};
pub use metrics::{check_power_mean, compute_metrics, Metrics};
