//! Chest X-ray report labeling and screening-utility evaluation.
//!
//! - [`labeler`] turns free-text radiology reports into 4-state labels over 13 conditions.
//! - [`datastore`] reads, writes, splits and summarizes study records.
//! - [`metrics`] computes ROC curves, AUROC, high-sensitivity operating points and work reduction.
//! - [`synth`] generates binormal classifier scores calibrated to a target AUROC.

pub mod condition;
pub mod datastore;
pub mod labeler;
pub mod metrics;
pub mod synth;

pub use condition::{Condition, Label4, LabelSet, ScoreSet};
pub use datastore::{LabelPolicy, StudyRecord};
pub use labeler::{Labeler, Lexicon, Mention};
pub use metrics::{EvalReport, OperatingPoint, RocCurve};
pub use synth::SynthSpec;
