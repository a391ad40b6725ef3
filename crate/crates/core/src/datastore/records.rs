use std::collections::HashMap;
use std::io::{Read, Write};

use crate::condition::{Condition, Label4, LabelSet, ScoreSet};

use super::DataError;

/// One chest X-ray study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRecord {
    pub study_id: String,
    pub patient_id: Option<String>,
    pub report_text: Option<String>,
    pub labels: Option<LabelSet>,
    pub scores: Option<ScoreSet>,
}

impl StudyRecord {
    pub fn new(study_id: impl Into<String>) -> Self {
        StudyRecord { study_id: study_id.into(), patient_id: None, report_text: None, labels: None, scores: None }
    }
}

pub fn label_column(c: Condition) -> String {
    format!("label_{}", c.name())
}

pub fn score_column(c: Condition) -> String {
    format!("score_{}", c.name())
}

#[derive(Debug, Clone, Copy)]
enum Column {
    StudyId,
    PatientId,
    ReportText,
    Label(Condition),
    Score(Condition),
}

fn classify_column(name: &str) -> Option<Column> {
    match name {
        "study_id" => return Some(Column::StudyId),
        "patient_id" => return Some(Column::PatientId),
        "report_text" => return Some(Column::ReportText),
        _ => {}
    }
    if let Some(rest) = name.strip_prefix("label_") {
        return Condition::ALL.into_iter().find(|c| c.name() == rest).map(Column::Label);
    }
    if let Some(rest) = name.strip_prefix("score_") {
        return Condition::OBSERVED.into_iter().find(|c| c.name() == rest).map(Column::Score);
    }
    None
}

/// Parses a records CSV.
///
/// `study_id` is required; `patient_id` and `report_text` are optional columns
/// whose empty cells read as absent. The 14 `label_*` columns and the 13
/// `score_*` columns are each all-or-nothing. Row numbers in errors count data
/// rows from 1; row 0 is the header.
pub fn parse_records<R: Read>(reader: R) -> Result<Vec<StudyRecord>, DataError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let schema_err =
        |row: usize, column: &str, reason: String| DataError::Schema { row, column: column.to_string(), reason };

    let mut columns = Vec::with_capacity(headers.len());
    let mut seen = std::collections::HashSet::new();
    for name in headers.iter() {
        let col = classify_column(name).ok_or_else(|| schema_err(0, name, "unknown column".into()))?;
        if !seen.insert(name) {
            return Err(schema_err(0, name, "duplicate column".into()));
        }
        columns.push(col);
    }
    if !columns.iter().any(|c| matches!(c, Column::StudyId)) {
        return Err(schema_err(0, "study_id", "missing required column".into()));
    }
    let n_labels = columns.iter().filter(|c| matches!(c, Column::Label(_))).count();
    if n_labels != 0 && n_labels != Condition::ALL.len() {
        let missing =
            Condition::ALL.into_iter().map(label_column).find(|n| !headers.iter().any(|h| h == n)).unwrap_or_default();
        return Err(schema_err(0, &missing, "label block is incomplete".into()));
    }
    let n_scores = columns.iter().filter(|c| matches!(c, Column::Score(_))).count();
    if n_scores != 0 && n_scores != Condition::OBSERVED.len() {
        let missing = Condition::OBSERVED
            .into_iter()
            .map(score_column)
            .find(|n| !headers.iter().any(|h| h == n))
            .unwrap_or_default();
        return Err(schema_err(0, &missing, "score block is incomplete".into()));
    }

    let mut records = Vec::new();
    let mut first_row: HashMap<String, usize> = HashMap::new();
    for (i, row) in rdr.records().enumerate() {
        let row_no = i + 1;
        let row = row?;
        let mut rec = StudyRecord::new(String::new());
        let mut labels = LabelSet::default();
        let mut scores = [0.0; 13];
        for ((col, name), cell) in columns.iter().zip(headers.iter()).zip(row.iter()) {
            match *col {
                Column::StudyId => {
                    if cell.trim().is_empty() {
                        return Err(schema_err(row_no, name, "empty study_id".into()));
                    }
                    rec.study_id = cell.to_string();
                }
                Column::PatientId => rec.patient_id = non_empty(cell),
                Column::ReportText => rec.report_text = non_empty(cell),
                Column::Label(c) => {
                    let label: Label4 = cell
                        .parse()
                        .map_err(|e: crate::condition::UnknownLabel| schema_err(row_no, name, e.to_string()))?;
                    if c == Condition::NoFinding && matches!(label, Label4::Negative | Label4::Uncertain) {
                        return Err(schema_err(row_no, name, "NoFinding must be POS or NOMENTION".into()));
                    }
                    labels[c] = label;
                }
                Column::Score(c) => {
                    let v: f64 = cell
                        .trim()
                        .parse()
                        .map_err(|_| schema_err(row_no, name, format!("`{cell}` is not a number")))?;
                    if !(0.0..=1.0).contains(&v) {
                        return Err(schema_err(row_no, name, format!("score {v} outside [0, 1]")));
                    }
                    scores[c.index()] = v;
                }
            }
        }
        if n_labels > 0 {
            rec.labels = Some(labels);
        }
        if n_scores > 0 {
            rec.scores = ScoreSet::new(scores);
        }
        if let Some(&prev) = first_row.get(&rec.study_id) {
            return Err(DataError::DuplicateId { id: rec.study_id, rows: vec![prev, row_no] });
        }
        first_row.insert(rec.study_id.clone(), row_no);
        records.push(rec);
    }
    Ok(records)
}

fn non_empty(cell: &str) -> Option<String> {
    (!cell.is_empty()).then(|| cell.to_string())
}

/// Writes a records CSV. The label and score blocks are emitted when any record
/// carries them, in which case every record must.
pub fn write_records<W: Write>(records: &[StudyRecord], writer: W) -> Result<(), DataError> {
    let with_labels = records.iter().any(|r| r.labels.is_some());
    let with_scores = records.iter().any(|r| r.scores.is_some());
    if let Some(r) = records.iter().find(|r| (with_labels && r.labels.is_none()) || (with_scores && r.scores.is_none()))
    {
        return Err(DataError::InconsistentBlocks { study_id: r.study_id.clone() });
    }

    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["study_id".to_string(), "patient_id".into(), "report_text".into()];
    if with_labels {
        header.extend(Condition::ALL.into_iter().map(label_column));
    }
    if with_scores {
        header.extend(Condition::OBSERVED.into_iter().map(score_column));
    }
    wtr.write_record(&header)?;

    let mut row: Vec<String> = Vec::with_capacity(header.len());
    for r in records {
        row.clear();
        row.push(r.study_id.clone());
        row.push(r.patient_id.clone().unwrap_or_default());
        row.push(r.report_text.clone().unwrap_or_default());
        if let Some(labels) = &r.labels {
            row.extend(labels.as_array().iter().map(|l| l.code().to_string()));
        }
        if let Some(scores) = &r.scores {
            // Display for f64 is the shortest string that parses back to the same value.
            row.extend(scores.as_array().iter().map(|s| s.to_string()));
        }
        wtr.write_record(&row)?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}
