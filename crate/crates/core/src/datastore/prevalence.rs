use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{DataError, StudyRecord};
use crate::condition::{Condition, Label4};

/// Label counts for one condition, indexed Positive, Negative, Uncertain, NoMention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionCounts {
    pub condition: Condition,
    pub positive: u64,
    pub negative: u64,
    pub uncertain: u64,
    pub no_mention: u64,
}

impl ConditionCounts {
    pub fn get(&self, label: Label4) -> u64 {
        match label {
            Label4::Positive => self.positive,
            Label4::Negative => self.negative,
            Label4::Uncertain => self.uncertain,
            Label4::NoMention => self.no_mention,
        }
    }

    fn bump(&mut self, label: Label4) {
        match label {
            Label4::Positive => self.positive += 1,
            Label4::Negative => self.negative += 1,
            Label4::Uncertain => self.uncertain += 1,
            Label4::NoMention => self.no_mention += 1,
        }
    }

    pub fn sum(&self) -> u64 {
        self.positive + self.negative + self.uncertain + self.no_mention
    }
}

/// Per-condition label distribution over a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrevalenceTable {
    pub total: u64,
    pub rows: Vec<ConditionCounts>,
}

impl PrevalenceTable {
    /// Builds a table from raw counts; every row must sum to `total`.
    pub fn from_counts(total: u64, rows: Vec<ConditionCounts>) -> Result<Self, DataError> {
        if total == 0 {
            return Err(DataError::EmptyDataset);
        }
        if let Some(r) = rows.iter().find(|r| r.sum() != total) {
            return Err(DataError::CountMismatch { condition: r.condition, sum: r.sum(), total });
        }
        Ok(PrevalenceTable { total, rows })
    }

    pub fn row(&self, c: Condition) -> Option<&ConditionCounts> {
        self.rows.iter().find(|r| r.condition == c)
    }

    /// Positive count over total, as an exact ratio rendered to `f64`.
    pub fn positive_fraction(&self, c: Condition) -> Option<f64> {
        self.row(c).map(|r| r.positive as f64 / self.total as f64)
    }

    /// Percentage in hundredths of a percent, rounded half up from exact counts.
    pub fn percent_hundredths(&self, count: u64) -> u64 {
        let num = count as u128 * 10_000 * 2 + self.total as u128;
        (num / (2 * self.total as u128)) as u64
    }

    /// `count` as a two-decimal percentage string, e.g. `21.50`.
    pub fn render_percent(&self, count: u64) -> String {
        let h = self.percent_hundredths(count);
        format!("{}.{:02}", h / 100, h % 100)
    }

    /// CSV with the count and percentage of each label per condition.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), DataError> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record([
            "condition",
            "positive",
            "positive_pct",
            "negative",
            "negative_pct",
            "uncertain",
            "uncertain_pct",
            "no_mention",
            "no_mention_pct",
        ])?;
        for r in &self.rows {
            let mut cells = vec![r.condition.display_name().to_string()];
            for label in Label4::ALL {
                let n = r.get(label);
                cells.push(n.to_string());
                cells.push(self.render_percent(n));
            }
            wtr.write_record(&cells)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Counts each label per condition across all 14 conditions.
pub fn prevalence_stats(records: &[StudyRecord]) -> Result<PrevalenceTable, DataError> {
    if records.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    let mut rows: Vec<ConditionCounts> = Condition::ALL
        .into_iter()
        .map(|condition| ConditionCounts { condition, positive: 0, negative: 0, uncertain: 0, no_mention: 0 })
        .collect();
    for r in records {
        let labels = r.labels.as_ref().ok_or_else(|| DataError::MissingLabels { study_id: r.study_id.clone() })?;
        for (c, l) in labels.iter() {
            rows[c.index()].bump(l);
        }
    }
    Ok(PrevalenceTable { total: records.len() as u64, rows })
}
