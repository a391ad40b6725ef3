use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::MetricsError;

/// One ROC vertex: predicting positive iff `score >= threshold` yields `tp`
/// true positives and `fp` false positives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub tp: u64,
    pub fp: u64,
}

/// Empirical ROC curve, ordered by decreasing threshold.
///
/// The first point is the `+inf` anchor at (0, 0); the last sits at the
/// smallest score and reaches (1, 1). Tied scores share one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub n_pos: u64,
    pub n_neg: u64,
}

impl RocCurve {
    pub fn tpr(&self, p: &RocPoint) -> f64 {
        p.tp as f64 / self.n_pos as f64
    }

    pub fn fpr(&self, p: &RocPoint) -> f64 {
        p.fp as f64 / self.n_neg as f64
    }

    /// `(fpr, tpr, threshold)` triples for plotting.
    pub fn coordinates(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.points.iter().map(|p| (self.fpr(p), self.tpr(p), p.threshold))
    }
}

/// Area under a ROC curve as an exact fraction of integers.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExactAuc {
    pub numerator: u128,
    pub denominator: u128,
}

impl ExactAuc {
    pub fn value(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl PartialEq for ExactAuc {
    fn eq(&self, other: &Self) -> bool {
        self.numerator * other.denominator == other.numerator * self.denominator
    }
}

impl Eq for ExactAuc {}

/// Builds the empirical ROC curve. `truths[i]` is true for positives.
pub fn roc_curve(scores: &[f64], truths: &[bool]) -> Result<RocCurve, MetricsError> {
    if scores.len() != truths.len() {
        return Err(MetricsError::LengthMismatch { scores: scores.len(), truths: truths.len() });
    }
    if let Some(index) = scores.iter().position(|s| !s.is_finite()) {
        return Err(MetricsError::NonFiniteScore { index });
    }
    let n_pos = truths.iter().filter(|&&t| t).count() as u64;
    let n_neg = truths.len() as u64 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(MetricsError::DegenerateClass { condition: None, n_pos, n_neg });
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(Ordering::Equal));

    let mut points = Vec::with_capacity(scores.len() + 1);
    points.push(RocPoint { threshold: f64::INFINITY, tp: 0, fp: 0 });
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            if truths[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint { threshold, tp, fp });
    }
    Ok(RocCurve { points, n_pos, n_neg })
}

/// Trapezoidal area under the curve along the fpr axis, kept as an exact ratio.
///
/// Each segment contributes `(fp_i - fp_{i-1}) * (tp_i + tp_{i-1}) / (2 * n_pos * n_neg)`,
/// which sums to `P(pos > neg) + P(pos = neg) / 2`.
pub fn auroc_exact(curve: &RocCurve) -> ExactAuc {
    let numerator = curve.points.windows(2).map(|w| (w[1].fp - w[0].fp) as u128 * (w[1].tp + w[0].tp) as u128).sum();
    ExactAuc { numerator, denominator: 2 * curve.n_pos as u128 * curve.n_neg as u128 }
}

pub fn auroc(curve: &RocCurve) -> f64 {
    auroc_exact(curve).value()
}
