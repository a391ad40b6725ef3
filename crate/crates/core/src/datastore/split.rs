use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DataError, StudyRecord};

pub const DEFAULT_RATIOS: [f64; 3] = [0.6, 0.2, 0.2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    #[serde(rename = "val")]
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn code(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "val",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Split {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "val" | "validation" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split `{other}`")),
        }
    }
}

/// Train/validation/test membership for every record, in record order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitAssignment {
    pub assignments: Vec<(String, Split)>,
    pub seed: u64,
    pub grouped_by_patient: bool,
}

impl SplitAssignment {
    pub fn get(&self, study_id: &str) -> Option<Split> {
        self.assignments.iter().find(|(id, _)| id == study_id).map(|&(_, s)| s)
    }

    pub fn count(&self, split: Split) -> usize {
        self.assignments.iter().filter(|(_, s)| *s == split).count()
    }

    pub fn ids_in(&self, split: Split) -> impl Iterator<Item = &str> {
        self.assignments.iter().filter(move |(_, s)| *s == split).map(|(id, _)| id.as_str())
    }

    /// Writes `# seed=<n> grouped=<bool>`, then `study_id,split` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), DataError> {
        writeln!(w, "# seed={} grouped={}", self.seed, self.grouped_by_patient)?;
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["study_id", "split"])?;
        for (id, split) in &self.assignments {
            wtr.write_record([id.as_str(), split.code()])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(mut r: R) -> Result<SplitAssignment, DataError> {
        let bad = |reason: String| DataError::Schema { row: 0, column: "#".into(), reason };
        let mut first = String::new();
        r.read_line(&mut first)?;
        let meta =
            first.trim().strip_prefix('#').ok_or_else(|| bad("missing `# seed=<n> grouped=<bool>` line".into()))?;
        let mut seed = None;
        let mut grouped = None;
        for kv in meta.split_whitespace() {
            match kv.split_once('=') {
                Some(("seed", v)) => seed = v.parse::<u64>().ok(),
                Some(("grouped", v)) => grouped = v.parse::<bool>().ok(),
                _ => {}
            }
        }
        let (seed, grouped_by_patient) =
            seed.zip(grouped).ok_or_else(|| bad(format!("malformed header comment `{}`", first.trim())))?;

        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["study_id", "split"] {
            return Err(DataError::Schema {
                row: 0,
                column: headers.iter().collect::<Vec<_>>().join(","),
                reason: "expected header `study_id,split`".into(),
            });
        }
        let mut assignments = Vec::new();
        for (i, row) in rdr.records().enumerate() {
            let row = row?;
            let split = row[1].parse::<Split>().map_err(|reason| DataError::Schema {
                row: i + 1,
                column: "split".into(),
                reason,
            })?;
            assignments.push((row[0].to_string(), split));
        }
        Ok(SplitAssignment { assignments, seed, grouped_by_patient })
    }
}

/// Partitions records into train/validation/test.
///
/// Records are grouped (by patient when `group_by_patient` is set and a
/// `patient_id` is present, otherwise one group per study). Groups are sorted
/// by key, shuffled with a ChaCha8 stream seeded from `seed`, and laid end to
/// end; a group joins the split whose cumulative record boundary its midpoint
/// falls before. Each split size is therefore within one group of its target.
pub fn split_dataset(
    records: &[StudyRecord],
    ratios: [f64; 3],
    seed: u64,
    group_by_patient: bool,
) -> Result<SplitAssignment, DataError> {
    if records.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    if ratios.iter().any(|r| r.is_nan() || *r <= 0.0) || (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(DataError::InvalidRatios(ratios));
    }

    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        let key = match (&r.patient_id, group_by_patient) {
            (Some(p), true) => format!("p:{p}"),
            _ => format!("s:{}", r.study_id),
        };
        groups.entry(key).or_default().push(i);
    }
    let mut order: Vec<Vec<usize>> = groups.into_values().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let n = records.len() as f64;
    let b1 = (ratios[0] * n).round() as usize;
    let b2 = ((ratios[0] + ratios[1]) * n).round() as usize;
    let mut split_of = vec![Split::Test; records.len()];
    let mut offset = 0;
    for members in order {
        // compare 2*midpoint against 2*boundary to stay in integers
        let twice_mid = 2 * offset + members.len();
        let split = if twice_mid < 2 * b1 {
            Split::Train
        } else if twice_mid < 2 * b2 {
            Split::Validation
        } else {
            Split::Test
        };
        offset += members.len();
        for i in members {
            split_of[i] = split;
        }
    }
    Ok(SplitAssignment {
        assignments: records.iter().zip(split_of).map(|(r, s)| (r.study_id.clone(), s)).collect(),
        seed,
        grouped_by_patient: group_by_patient,
    })
}
