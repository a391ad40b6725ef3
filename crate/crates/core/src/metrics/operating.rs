use serde::{Deserialize, Serialize};

use super::roc::{roc_curve, RocCurve};
use super::MetricsError;

/// The sensitivity the screening operating point is tuned for.
pub const DEFAULT_TARGET_SENSITIVITY: f64 = 0.95;

/// A threshold with the sensitivity and specificity it achieves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub threshold: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub target_sensitivity: f64,
    pub tp: u64,
    pub fp: u64,
    pub n_pos: u64,
    pub n_neg: u64,
}

impl RocCurve {
    /// The most specific empirical threshold whose sensitivity reaches `target`.
    ///
    /// No interpolation: the returned threshold is one of the observed scores.
    /// Specificity only falls as the threshold drops, so this is the largest
    /// qualifying threshold, which also settles ties in specificity.
    pub fn operating_point(&self, target: f64) -> Result<OperatingPoint, MetricsError> {
        if !(target > 0.0 && target <= 1.0) {
            return Err(MetricsError::InvalidTarget(target));
        }
        let p = self.points.iter().skip(1).find(|p| self.tpr(p) >= target).expect("last ROC point has sensitivity 1");
        Ok(OperatingPoint {
            threshold: p.threshold,
            sensitivity: self.tpr(p),
            specificity: (self.n_neg - p.fp) as f64 / self.n_neg as f64,
            target_sensitivity: target,
            tp: p.tp,
            fp: p.fp,
            n_pos: self.n_pos,
            n_neg: self.n_neg,
        })
    }
}

pub fn operating_point_at_sensitivity(
    scores: &[f64],
    truths: &[bool],
    target: f64,
) -> Result<OperatingPoint, MetricsError> {
    roc_curve(scores, truths)?.operating_point(target)
}
