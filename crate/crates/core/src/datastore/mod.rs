//! Study records: CSV I/O, dataset splitting, label statistics and label binarization.

mod policy;
mod prevalence;
mod records;
mod split;

pub use policy::{apply_label_policy, LabelPolicy, NoMentionPolicy, Truth, UncertainPolicy};
pub use prevalence::{prevalence_stats, ConditionCounts, PrevalenceTable};
pub use records::{label_column, parse_records, score_column, write_records, StudyRecord};
pub use split::{split_dataset, Split, SplitAssignment, DEFAULT_RATIOS};

use crate::condition::Condition;

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("row {row}, column `{column}`: {reason}")]
    Schema { row: usize, column: String, reason: String },
    #[error("duplicate study_id `{id}` (data rows {rows:?})")]
    DuplicateId { id: String, rows: Vec<usize> },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("record `{study_id}` has no labels")]
    MissingLabels { study_id: String },
    #[error("record `{study_id}` lacks a block other records carry")]
    InconsistentBlocks { study_id: String },
    #[error("split ratios {0:?} must be positive and sum to 1")]
    InvalidRatios([f64; 3]),
    #[error("{condition}: label counts sum to {sum}, expected {total}")]
    CountMismatch { condition: Condition, sum: u64, total: u64 },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
