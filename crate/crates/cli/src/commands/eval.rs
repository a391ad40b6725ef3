use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use clap::Args;
use cxrtriage::datastore::{PrevalenceTable, Split, SplitAssignment};
use cxrtriage::metrics::{evaluate_model, roc_curves, EvalOptions, WrSensitivity, DEFAULT_TARGET_SENSITIVITY};
use cxrtriage::{Condition, LabelPolicy, RocCurve, StudyRecord};
use serde::{Deserialize, Serialize};

use super::{csv_bytes, json_bytes, read_records, required, Command, Outputs};
use crate::config::impl_merge;
use crate::error::CliError;
use crate::output::read_input;
use crate::plot::{line_chart, Series};

pub(crate) const NAME: &str = "eval";

/// AUROC, high-sensitivity operating point and work reduction per condition.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct EvalArgs {
    /// Records CSV with labels and scores
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Split assignment CSV; only records in --split-name are evaluated
    #[arg(long)]
    pub split_file: Option<PathBuf>,
    /// Split to evaluate [default: test]
    #[arg(long)]
    pub split_name: Option<Split>,
    /// Label binarization [default: uncertain-exclude,nomention-negative]
    #[arg(long)]
    pub policy: Option<LabelPolicy>,
    /// Sensitivity the operating point must reach [default: 0.95]
    #[arg(long)]
    pub target_sens: Option<f64>,
    /// Use the target rather than the achieved sensitivity for work reduction
    #[arg(long)]
    pub nominal_sens: bool,
    /// Disease ratios for work reduction: a `stats --json-out` file or a {Condition: ratio} map
    #[arg(long)]
    pub prevalence_from: Option<PathBuf>,
    /// Comma-separated conditions [default: all 13]
    #[arg(long, value_delimiter = ',')]
    pub conditions: Vec<Condition>,
    /// Dataset name recorded in the report; compare requires it to match
    #[arg(long)]
    pub dataset_id: Option<String>,
    /// [default: records file stem]
    #[arg(long)]
    pub model_id: Option<String>,
    /// Full-precision report JSON
    #[arg(long)]
    pub report_out: Option<PathBuf>,
    /// Three-decimal table CSV with Mean and STD rows
    #[arg(long)]
    pub table_out: Option<PathBuf>,
    /// Directory for roc_<Condition>.csv files
    #[arg(long)]
    pub roc_out: Option<PathBuf>,
    /// ROC curves of all conditions as one SVG
    #[arg(long)]
    pub svg_out: Option<PathBuf>,
}

impl_merge!(EvalArgs {
    records,
    split_file,
    split_name,
    policy,
    target_sens,
    nominal_sens,
    prevalence_from,
    conditions,
    dataset_id,
    model_id,
    report_out,
    table_out,
    roc_out,
    svg_out,
});

impl Command for EvalArgs {
    const NAME: &'static str = NAME;

    fn resolve(&mut self) -> Result<(), CliError> {
        let records = required(&self.records, "records")?.clone();
        required(&self.report_out, "report-out")?;
        if self.split_file.is_some() {
            self.split_name.get_or_insert(Split::Test);
        } else if self.split_name.is_some() {
            return Err(CliError::input("--split-name needs --split-file"));
        }
        self.policy.get_or_insert_with(LabelPolicy::default);
        self.target_sens.get_or_insert(DEFAULT_TARGET_SENSITIVITY);
        if self.conditions.is_empty() {
            self.conditions = Condition::OBSERVED.to_vec();
        }
        self.dataset_id.get_or_insert_with(String::new);
        self.model_id
            .get_or_insert_with(|| records.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
        Ok(())
    }

    fn inputs(&self) -> Vec<PathBuf> {
        self.records.iter().chain(&self.split_file).chain(&self.prevalence_from).cloned().collect()
    }

    fn primary_output(&self) -> &Path {
        self.report_out.as_deref().expect("resolved")
    }

    fn execute(&self) -> Result<Outputs, CliError> {
        let mut records = read_records(required(&self.records, "records")?)?;
        if let (Some(path), Some(name)) = (&self.split_file, self.split_name) {
            records = select_split(records, path, name)?;
        }
        let options = EvalOptions {
            policy: self.policy.unwrap_or_default(),
            target_sensitivity: self.target_sens.unwrap_or(DEFAULT_TARGET_SENSITIVITY),
            wr_sensitivity: if self.nominal_sens { WrSensitivity::Nominal } else { WrSensitivity::Achieved },
            prevalence_override: self.prevalence_from.as_deref().map(read_prevalence).transpose()?,
            conditions: self.conditions.clone(),
            dataset_id: self.dataset_id.clone().unwrap_or_default(),
            model_id: self.model_id.clone().unwrap_or_default(),
        };
        let report = evaluate_model(&records, &options)?;

        let mut files = vec![(self.report_out.clone().expect("resolved"), json_bytes(&report)?)];
        if let Some(p) = &self.table_out {
            files.push((p.clone(), csv_bytes(|w| report.write_table_csv(w))?));
        }
        if self.roc_out.is_some() || self.svg_out.is_some() {
            let curves = roc_curves(&records, &options.conditions, options.policy)?;
            if let Some(dir) = &self.roc_out {
                for (c, curve) in &curves {
                    files.push((dir.join(format!("roc_{}.csv", c.name())), roc_csv(curve)?));
                }
            }
            if let Some(p) = &self.svg_out {
                let series: Vec<Series> = curves
                    .iter()
                    .map(|(c, curve)| Series {
                        label: c.display_name().to_string(),
                        points: curve.coordinates().map(|(x, y, _)| (x, y)).collect(),
                    })
                    .collect();
                let title = format!("ROC, {}", options.model_id);
                files.push((p.clone(), line_chart(&title, "1 - specificity", "sensitivity", &series).into_bytes()));
            }
        }
        let a = &report.aggregate;
        let summary = format!(
            "{} records, {} conditions: mean AUROC {:.3}, mean specificity {:.3}, mean work reduction {:.3}",
            records.len(),
            report.rows.len(),
            a.auroc.mean,
            a.specificity.mean,
            a.work_reduction.mean
        );
        Ok(Outputs { files, summary })
    }
}

fn select_split(records: Vec<StudyRecord>, path: &Path, name: Split) -> Result<Vec<StudyRecord>, CliError> {
    let assignment = SplitAssignment::read_csv(read_input(path)?.as_slice())
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let known: HashSet<&str> = assignment.assignments.iter().map(|(id, _)| id.as_str()).collect();
    if let Some(r) = records.iter().find(|r| !known.contains(r.study_id.as_str())) {
        return Err(CliError::input(format!("{}: study `{}` has no split", path.display(), r.study_id)));
    }
    let keep: HashSet<&str> = assignment.ids_in(name).collect();
    Ok(records.into_iter().filter(|r| keep.contains(r.study_id.as_str())).collect())
}

fn read_prevalence(path: &Path) -> Result<BTreeMap<Condition, f64>, CliError> {
    let bytes = read_input(path)?;
    if let Ok(table) = serde_json::from_slice::<PrevalenceTable>(&bytes) {
        return Ok(Condition::OBSERVED
            .into_iter()
            .filter_map(|c| table.positive_fraction(c).map(|p| (c, p)))
            .collect());
    }
    serde_json::from_slice(&bytes).map_err(|e| {
        CliError::input(format!("{}: neither a prevalence table nor a condition map: {e}", path.display()))
    })
}

/// `fpr,tpr,threshold`; the first row is the `inf` threshold at the origin.
fn roc_csv(curve: &RocCurve) -> Result<Vec<u8>, CliError> {
    csv_bytes(|w| {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["fpr", "tpr", "threshold"])?;
        for (x, y, t) in curve.coordinates() {
            let t = if t.is_infinite() { "inf".to_string() } else { t.to_string() };
            wtr.write_record([x.to_string(), y.to_string(), t])?;
        }
        wtr.flush()?;
        Ok(())
    })
}
