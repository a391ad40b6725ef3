//! ROC analysis, high-sensitivity operating points, work reduction and model comparison.
//!
//! Predictions are positive iff `score >= threshold`. Counting happens on
//! integers; floating point only appears in the final ratios.

mod compare;
mod operating;
mod report;
mod roc;
mod utility;

pub use compare::{compare_models, Better, Comparison, ConditionDelta, MeanDelta};
pub use operating::{operating_point_at_sensitivity, OperatingPoint, DEFAULT_TARGET_SENSITIVITY};
pub use report::{
    condition_data, evaluate_model, roc_curves, Aggregate, ConditionData, ConditionEval, EvalOptions, EvalReport,
    MeanStd, WrSensitivity,
};
pub use roc::{auroc, auroc_exact, roc_curve, ExactAuc, RocCurve, RocPoint};
pub use utility::{format_change, ratio_grid, relative_change, work_reduction, wr_curve, WrPoint};

use crate::condition::Condition;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("{scores} scores but {truths} truth values")]
    LengthMismatch { scores: usize, truths: usize },
    #[error("score at index {index} is not finite")]
    NonFiniteScore { index: usize },
    #[error("{}needs both classes (positives: {n_pos}, negatives: {n_neg})", .condition.map(|c| format!("{c}: ")).unwrap_or_default())]
    DegenerateClass { condition: Option<Condition>, n_pos: u64, n_neg: u64 },
    #[error("target sensitivity {0} outside (0, 1]")]
    InvalidTarget(f64),
    #[error("relative change from {baseline} to {new} needs both values positive")]
    ZeroBaseline { baseline: f64, new: f64 },
    #[error("reports cover different conditions: {a:?} vs {b:?}")]
    MismatchedConditions { a: Vec<Condition>, b: Vec<Condition> },
    #[error("reports come from different datasets: `{a}` vs `{b}`")]
    MismatchedDataset { a: String, b: String },
    #[error("record `{study_id}` lacks labels or scores")]
    MissingData { study_id: String },
    #[error("no {0} given")]
    Empty(&'static str),
    #[error("{0}")]
    InvalidArgument(String),
}

impl MetricsError {
    pub(crate) fn for_condition(self, c: Condition) -> Self {
        match self {
            MetricsError::DegenerateClass { n_pos, n_neg, .. } => {
                MetricsError::DegenerateClass { condition: Some(c), n_pos, n_neg }
            }
            other => other,
        }
    }
}
