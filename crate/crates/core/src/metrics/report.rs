use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::operating::DEFAULT_TARGET_SENSITIVITY;
use super::roc::{auroc_exact, roc_curve, ExactAuc, RocCurve};
use super::utility::work_reduction;
use super::MetricsError;
use crate::condition::Condition;
use crate::datastore::{LabelPolicy, StudyRecord, Truth};

/// Which sensitivity feeds the work-reduction formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WrSensitivity {
    /// The sensitivity achieved at the chosen threshold.
    #[default]
    Achieved,
    /// The target sensitivity itself.
    Nominal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub policy: LabelPolicy,
    pub target_sensitivity: f64,
    pub wr_sensitivity: WrSensitivity,
    /// Disease ratios to use instead of the evaluated records' own prevalence.
    pub prevalence_override: Option<BTreeMap<Condition, f64>>,
    pub conditions: Vec<Condition>,
    pub dataset_id: String,
    pub model_id: String,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            policy: LabelPolicy::default(),
            target_sensitivity: DEFAULT_TARGET_SENSITIVITY,
            wr_sensitivity: WrSensitivity::Achieved,
            prevalence_override: None,
            conditions: Condition::OBSERVED.to_vec(),
            dataset_id: String::new(),
            model_id: String::new(),
        }
    }
}

/// Per-condition evaluation row.
///
/// Rows built by [`evaluate_model`] carry counts, the exact AUROC and the
/// threshold. Rows built from published summary figures leave those empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionEval {
    pub condition: Condition,
    pub auroc: f64,
    pub auroc_exact: Option<ExactAuc>,
    pub n_pos: u64,
    pub n_neg: u64,
    pub n_excluded: u64,
    pub threshold: Option<f64>,
    pub sensitivity: f64,
    pub specificity: f64,
    pub prevalence: f64,
    pub work_reduction: f64,
}

impl ConditionEval {
    /// A row from summary figures only.
    pub fn summary(
        condition: Condition,
        auroc: f64,
        sensitivity: f64,
        specificity: f64,
        prevalence: f64,
        work_reduction: f64,
    ) -> Self {
        ConditionEval {
            condition,
            auroc,
            auroc_exact: None,
            n_pos: 0,
            n_neg: 0,
            n_excluded: 0,
            threshold: None,
            sensitivity,
            specificity,
            prevalence,
            work_reduction,
        }
    }
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: impl IntoIterator<Item = f64>) -> MeanStd {
        let v: Vec<f64> = values.into_iter().collect();
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        MeanStd { mean, std: var.sqrt() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub auroc: MeanStd,
    pub sensitivity: MeanStd,
    pub specificity: MeanStd,
    pub prevalence: MeanStd,
    pub work_reduction: MeanStd,
}

impl Aggregate {
    pub fn from_rows(rows: &[ConditionEval]) -> Aggregate {
        Aggregate {
            auroc: MeanStd::of(rows.iter().map(|r| r.auroc)),
            sensitivity: MeanStd::of(rows.iter().map(|r| r.sensitivity)),
            specificity: MeanStd::of(rows.iter().map(|r| r.specificity)),
            prevalence: MeanStd::of(rows.iter().map(|r| r.prevalence)),
            work_reduction: MeanStd::of(rows.iter().map(|r| r.work_reduction)),
        }
    }
}

/// Per-condition AUROC and high-sensitivity operating-point metrics for one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset_id: String,
    pub model_id: String,
    pub policy: LabelPolicy,
    pub target_sensitivity: f64,
    pub wr_sensitivity: WrSensitivity,
    pub external_prevalence: bool,
    pub rows: Vec<ConditionEval>,
    pub aggregate: Aggregate,
}

impl EvalReport {
    /// Assembles a report and computes its aggregates from `rows`.
    pub fn from_rows(options: &EvalOptions, rows: Vec<ConditionEval>) -> Result<EvalReport, MetricsError> {
        if rows.is_empty() {
            return Err(MetricsError::Empty("condition rows"));
        }
        Ok(EvalReport {
            dataset_id: options.dataset_id.clone(),
            model_id: options.model_id.clone(),
            policy: options.policy,
            target_sensitivity: options.target_sensitivity,
            wr_sensitivity: options.wr_sensitivity,
            external_prevalence: options.prevalence_override.is_some(),
            aggregate: Aggregate::from_rows(&rows),
            rows,
        })
    }

    pub fn row(&self, c: Condition) -> Option<&ConditionEval> {
        self.rows.iter().find(|r| r.condition == c)
    }

    /// `(sensitivity, specificity)` per condition, with the sensitivity chosen by `mode`.
    pub fn operating_points(&self, mode: WrSensitivity) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .map(|r| {
                let sens = match mode {
                    WrSensitivity::Achieved => r.sensitivity,
                    WrSensitivity::Nominal => self.target_sensitivity,
                };
                (sens, r.specificity)
            })
            .collect()
    }

    /// Table layout with three-decimal values, followed by Mean and STD rows.
    pub fn write_table_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["condition", "auroc", "sensitivity", "specificity", "prevalence", "work_reduction"])?;
        let f = |x: f64| format!("{x:.3}");
        for r in &self.rows {
            wtr.write_record([
                r.condition.display_name().to_string(),
                f(r.auroc),
                f(r.sensitivity),
                f(r.specificity),
                f(r.prevalence),
                f(r.work_reduction),
            ])?;
        }
        let a = &self.aggregate;
        for (name, pick) in [("Mean", 0), ("STD", 1)] {
            let g = |m: MeanStd| f(if pick == 0 { m.mean } else { m.std });
            wtr.write_record([
                name.to_string(),
                g(a.auroc),
                g(a.sensitivity),
                g(a.specificity),
                g(a.prevalence),
                g(a.work_reduction),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// One condition's scores and binarized truths, excluded records dropped.
pub struct ConditionData {
    pub condition: Condition,
    pub scores: Vec<f64>,
    pub truths: Vec<bool>,
    pub n_excluded: u64,
}

/// Binarizes labels under `policy` and pairs them with scores.
pub fn condition_data(
    records: &[StudyRecord],
    condition: Condition,
    policy: LabelPolicy,
) -> Result<ConditionData, MetricsError> {
    let mut scores = Vec::with_capacity(records.len());
    let mut truths = Vec::with_capacity(records.len());
    let mut n_excluded = 0;
    for r in records {
        let (labels, s) = match (&r.labels, &r.scores) {
            (Some(l), Some(s)) => (l, s),
            _ => return Err(MetricsError::MissingData { study_id: r.study_id.clone() }),
        };
        match policy.apply(labels[condition]) {
            Truth::Excluded => n_excluded += 1,
            t => {
                scores.push(s.get(condition));
                truths.push(t == Truth::Positive);
            }
        }
    }
    Ok(ConditionData { condition, scores, truths, n_excluded })
}

/// ROC curve per condition under `policy`, in `conditions` order.
pub fn roc_curves(
    records: &[StudyRecord],
    conditions: &[Condition],
    policy: LabelPolicy,
) -> Result<Vec<(Condition, RocCurve)>, MetricsError> {
    conditions
        .iter()
        .map(|&c| {
            let d = condition_data(records, c, policy)?;
            let curve = roc_curve(&d.scores, &d.truths).map_err(|e| e.for_condition(c))?;
            Ok((c, curve))
        })
        .collect()
}

fn evaluate_condition(
    records: &[StudyRecord],
    condition: Condition,
    options: &EvalOptions,
) -> Result<ConditionEval, MetricsError> {
    let data = condition_data(records, condition, options.policy)?;
    let curve = roc_curve(&data.scores, &data.truths).map_err(|e| e.for_condition(condition))?;
    let exact = auroc_exact(&curve);
    let op = curve.operating_point(options.target_sensitivity)?;
    let prevalence = match &options.prevalence_override {
        Some(map) => *map
            .get(&condition)
            .ok_or_else(|| MetricsError::InvalidArgument(format!("no external prevalence for {condition}")))?,
        None => curve.n_pos as f64 / (curve.n_pos + curve.n_neg) as f64,
    };
    let wr_sens = match options.wr_sensitivity {
        WrSensitivity::Achieved => op.sensitivity,
        WrSensitivity::Nominal => options.target_sensitivity,
    };
    Ok(ConditionEval {
        condition,
        auroc: exact.value(),
        auroc_exact: Some(exact),
        n_pos: curve.n_pos,
        n_neg: curve.n_neg,
        n_excluded: data.n_excluded,
        threshold: Some(op.threshold),
        sensitivity: op.sensitivity,
        specificity: op.specificity,
        prevalence,
        work_reduction: work_reduction(wr_sens, op.specificity, prevalence),
    })
}

/// Evaluates every condition in `options.conditions`.
///
/// Conditions are processed in parallel; the result does not depend on the
/// number of threads or on record order. The first failing condition in
/// `options.conditions` order is reported.
pub fn evaluate_model(records: &[StudyRecord], options: &EvalOptions) -> Result<EvalReport, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::Empty("records"));
    }
    if let Some(&c) = options.conditions.iter().find(|c| !c.is_observed()) {
        return Err(MetricsError::InvalidArgument(format!("{c} has no scores")));
    }
    let results: Vec<Result<ConditionEval, MetricsError>> =
        options.conditions.par_iter().map(|&c| evaluate_condition(records, c, options)).collect();
    let rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    EvalReport::from_rows(options, rows)
}
