use std::io::Write;

use serde::{Deserialize, Serialize};

use super::report::{EvalReport, MeanStd};
use super::utility::{format_change, relative_change};
use super::MetricsError;
use crate::condition::Condition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Better {
    A,
    B,
    Tie,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionDelta {
    pub condition: Condition,
    pub auroc_a: f64,
    pub auroc_b: f64,
    /// `auroc_b - auroc_a`
    pub delta: f64,
    /// Change from A to B; `None` when undefined.
    pub relative_change: Option<f64>,
    pub better: Better,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanDelta {
    pub metric: String,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub relative_change: Option<f64>,
}

impl MeanDelta {
    fn new(metric: &str, a: MeanStd, b: MeanStd) -> Self {
        MeanDelta {
            metric: metric.to_string(),
            a: a.mean,
            b: b.mean,
            delta: b.mean - a.mean,
            relative_change: relative_change(a.mean, b.mean).ok(),
        }
    }
}

/// Model A against model B on the same dataset and condition set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub dataset_id: String,
    pub model_a: String,
    pub model_b: String,
    pub rows: Vec<ConditionDelta>,
    pub means: Vec<MeanDelta>,
}

impl Comparison {
    pub fn wins(&self, who: Better) -> usize {
        self.rows.iter().filter(|r| r.better == who).count()
    }

    pub fn mean(&self, metric: &str) -> Option<&MeanDelta> {
        self.means.iter().find(|m| m.metric == metric)
    }

    /// Per-condition AUROC rows then mean rows; values to three decimals,
    /// relative changes as signed percentages.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["row", "a", "b", "delta", "relative_change", "better"])?;
        let pct = |r: Option<f64>| r.map(format_change).unwrap_or_default();
        for r in &self.rows {
            let better = match r.better {
                Better::A => self.model_a.as_str(),
                Better::B => self.model_b.as_str(),
                Better::Tie => "tie",
            };
            wtr.write_record([
                r.condition.display_name().to_string(),
                format!("{:.3}", r.auroc_a),
                format!("{:.3}", r.auroc_b),
                format!("{:+.3}", r.delta),
                pct(r.relative_change),
                better.to_string(),
            ])?;
        }
        for m in &self.means {
            wtr.write_record([
                format!("mean {}", m.metric),
                format!("{:.3}", m.a),
                format!("{:.3}", m.b),
                format!("{:+.3}", m.delta),
                pct(m.relative_change),
                String::new(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Per-condition AUROC deltas, mean-row deltas and the better model per condition.
pub fn compare_models(a: &EvalReport, b: &EvalReport) -> Result<Comparison, MetricsError> {
    if a.dataset_id != b.dataset_id {
        return Err(MetricsError::MismatchedDataset { a: a.dataset_id.clone(), b: b.dataset_id.clone() });
    }
    let conds_a: Vec<Condition> = a.rows.iter().map(|r| r.condition).collect();
    let mut conds_b: Vec<Condition> = b.rows.iter().map(|r| r.condition).collect();
    let mut sorted_a = conds_a.clone();
    sorted_a.sort();
    conds_b.sort();
    if sorted_a != conds_b {
        return Err(MetricsError::MismatchedConditions { a: sorted_a, b: conds_b });
    }

    let rows = a
        .rows
        .iter()
        .map(|ra| {
            let rb = b.row(ra.condition).expect("condition sets match");
            let better = if rb.auroc > ra.auroc {
                Better::B
            } else if rb.auroc < ra.auroc {
                Better::A
            } else {
                Better::Tie
            };
            ConditionDelta {
                condition: ra.condition,
                auroc_a: ra.auroc,
                auroc_b: rb.auroc,
                delta: rb.auroc - ra.auroc,
                relative_change: relative_change(ra.auroc, rb.auroc).ok(),
                better,
            }
        })
        .collect();
    let (ga, gb) = (&a.aggregate, &b.aggregate);
    Ok(Comparison {
        dataset_id: a.dataset_id.clone(),
        model_a: name_or(&a.model_id, "A"),
        model_b: name_or(&b.model_id, "B"),
        rows,
        means: vec![
            MeanDelta::new("auroc", ga.auroc, gb.auroc),
            MeanDelta::new("specificity", ga.specificity, gb.specificity),
            MeanDelta::new("work_reduction", ga.work_reduction, gb.work_reduction),
        ],
    })
}

fn name_or(id: &str, fallback: &str) -> String {
    if id.is_empty() {
        fallback.to_string()
    } else {
        id.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::report::{ConditionEval, EvalOptions};

    fn report(model: &str, values: &[(Condition, f64, f64, f64)]) -> EvalReport {
        let rows =
            values.iter().map(|&(c, auc, spec, wr)| ConditionEval::summary(c, auc, 0.95, spec, 0.1, wr)).collect();
        let opts = EvalOptions { dataset_id: "thai".into(), model_id: model.into(), ..EvalOptions::default() };
        EvalReport::from_rows(&opts, rows).unwrap()
    }

    #[test]
    fn identical_reports_have_zero_deltas() {
        let r = report("m", &[(Condition::Edema, 0.9, 0.5, 0.5), (Condition::Hernia, 0.8, 0.4, 0.4)]);
        let c = compare_models(&r, &r).unwrap();
        assert!(c.rows.iter().all(|d| d.delta == 0.0 && d.better == Better::Tie));
        assert!(c.means.iter().all(|m| m.delta == 0.0 && m.relative_change == Some(0.0)));
    }

    #[test]
    fn mean_work_reduction_change() {
        let a = report("ref", &[(Condition::Edema, 0.85, 0.4, 0.383)]);
        let b = report("local", &[(Condition::Edema, 0.91, 0.6, 0.559)]);
        let c = compare_models(&a, &b).unwrap();
        let wr = c.mean("work_reduction").unwrap();
        assert_eq!(format_change(wr.relative_change.unwrap()), "+46.0%");
        assert_eq!(c.wins(Better::B), 1);
    }

    #[test]
    fn condition_order_may_differ() {
        let a = report("a", &[(Condition::Edema, 0.9, 0.5, 0.5), (Condition::Hernia, 0.8, 0.4, 0.4)]);
        let b = report("b", &[(Condition::Hernia, 0.85, 0.4, 0.4), (Condition::Edema, 0.7, 0.5, 0.5)]);
        let c = compare_models(&a, &b).unwrap();
        assert_eq!(c.rows[0].condition, Condition::Edema);
        assert_eq!(c.rows[0].better, Better::A);
        assert_eq!(c.rows[1].better, Better::B);
    }

    #[test]
    fn mismatches() {
        let a = report("a", &[(Condition::Edema, 0.9, 0.5, 0.5)]);
        let b = report("b", &[(Condition::Hernia, 0.9, 0.5, 0.5)]);
        assert!(matches!(compare_models(&a, &b), Err(MetricsError::MismatchedConditions { .. })));
        let mut c = a.clone();
        c.dataset_id = "other".into();
        assert!(matches!(compare_models(&a, &c), Err(MetricsError::MismatchedDataset { .. })));
    }
}
