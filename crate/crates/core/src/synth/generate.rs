use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::normal::mu_for_auroc;
use super::SynthError;
use crate::condition::{Condition, Label4, LabelSet, ScoreSet};
use crate::datastore::StudyRecord;
use crate::labeler::{derive_no_finding, NoFindingRule};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionSpec {
    pub target_auroc: f64,
    pub disease_ratio: f64,
}

/// Parameters for binormal score generation.
///
/// Every observed condition takes its entry in `conditions`, falling back to
/// `default`; a spec without `default` must list all 13.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub n_records: usize,
    pub seed: u64,
    #[serde(default)]
    pub default: Option<ConditionSpec>,
    #[serde(default)]
    pub conditions: BTreeMap<Condition, ConditionSpec>,
    /// Attach a templated report mentioning each positive condition.
    #[serde(default)]
    pub emit_reports: bool,
}

impl SynthSpec {
    /// Same target and ratio for every condition.
    pub fn uniform(n_records: usize, seed: u64, target_auroc: f64, disease_ratio: f64) -> Self {
        SynthSpec {
            n_records,
            seed,
            default: Some(ConditionSpec { target_auroc, disease_ratio }),
            conditions: BTreeMap::new(),
            emit_reports: false,
        }
    }

    pub fn resolve(&self, c: Condition) -> Result<ConditionSpec, SynthError> {
        self.conditions
            .get(&c)
            .or(self.default.as_ref())
            .copied()
            .ok_or_else(|| SynthError::InvalidSpec(format!("no parameters for {c} and no default")))
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.n_records < 2 {
            return Err(SynthError::InvalidSpec(format!("n_records must be at least 2, got {}", self.n_records)));
        }
        if self.conditions.contains_key(&Condition::NoFinding) {
            return Err(SynthError::InvalidSpec("NoFinding is derived and takes no parameters".into()));
        }
        for c in Condition::OBSERVED {
            let cs = self.resolve(c)?;
            if !(cs.target_auroc > 0.0 && cs.target_auroc < 1.0) {
                return Err(SynthError::InvalidSpec(format!("{c}: target_auroc {} outside (0, 1)", cs.target_auroc)));
            }
            if !(cs.disease_ratio > 0.0 && cs.disease_ratio < 1.0) {
                return Err(SynthError::InvalidSpec(format!("{c}: disease_ratio {} outside (0, 1)", cs.disease_ratio)));
            }
        }
        Ok(())
    }
}

/// Class membership and latent (pre-logistic) score for one condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionDraws {
    pub positive: Vec<bool>,
    pub latent: Vec<f64>,
}

/// Draws one condition's column.
///
/// Each condition reads its own ChaCha20 stream (`seed`, stream id =
/// condition index), so a column never depends on which other conditions are
/// generated or in what order. Per record the stream yields a uniform for
/// the Bernoulli class draw, then a standard normal; positives are shifted
/// by `mu_for_auroc(target)`.
pub fn draw_condition(spec: &SynthSpec, condition: Condition) -> Result<ConditionDraws, SynthError> {
    let cs = spec.resolve(condition)?;
    let mu = mu_for_auroc(cs.target_auroc)?;
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    rng.set_stream(condition.index() as u64);
    let mut positive = Vec::with_capacity(spec.n_records);
    let mut latent = Vec::with_capacity(spec.n_records);
    for _ in 0..spec.n_records {
        let is_pos = rng.random::<f64>() < cs.disease_ratio;
        let z: f64 = rng.sample(StandardNormal);
        positive.push(is_pos);
        latent.push(if is_pos { z + mu } else { z });
    }
    Ok(ConditionDraws { positive, latent })
}

pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// One phrase per condition that the bundled lexicon maps back to it.
pub fn report_phrase(c: Condition) -> &'static str {
    match c {
        Condition::Atelectasis => "atelectasis",
        Condition::Cardiomegaly => "cardiomegaly",
        Condition::Consolidation => "consolidation",
        Condition::Edema => "pulmonary edema",
        Condition::LungOpacity => "lung opacity",
        Condition::Pneumonia => "pneumonia",
        Condition::PleuralEffusion => "pleural effusion",
        Condition::Pneumothorax => "pneumothorax",
        Condition::PleuralOther => "pleural thickening",
        Condition::Hernia => "hiatal hernia",
        Condition::Emphysema => "emphysema",
        Condition::Fracture => "rib fracture",
        Condition::SupportDevices => "pacemaker",
        Condition::NoFinding => "",
    }
}

fn templated_report(labels: &LabelSet) -> String {
    let sentences: Vec<String> = Condition::OBSERVED
        .into_iter()
        .filter(|&c| labels[c] == Label4::Positive)
        .map(|c| {
            let phrase = report_phrase(c);
            let mut chars = phrase.chars();
            let first = chars.next().map(|ch| ch.to_ascii_uppercase()).unwrap_or_default();
            format!("{first}{} is present.", chars.as_str())
        })
        .collect();
    if sentences.is_empty() {
        "Lungs are clear. Heart size normal.".to_string()
    } else {
        sentences.join(" ")
    }
}

/// Generates labeled, scored records.
///
/// Positives get `Positive` labels and negatives `NoMention`; `NoFinding` is
/// derived with the default rule. Scores are the logistic of the latent draw.
/// Study ids are `S0000000`, `S0000001`, ...; consecutive pairs share a patient.
pub fn generate_scores(spec: &SynthSpec) -> Result<Vec<StudyRecord>, SynthError> {
    spec.validate()?;
    let columns: Vec<ConditionDraws> =
        Condition::OBSERVED.par_iter().map(|&c| draw_condition(spec, c)).collect::<Result<_, _>>()?;
    let rule = NoFindingRule::default();
    let records = (0..spec.n_records)
        .map(|i| {
            let mut labels = LabelSet::default();
            let mut scores = [0.0; 13];
            for (c, col) in Condition::OBSERVED.into_iter().zip(&columns) {
                if col.positive[i] {
                    labels[c] = Label4::Positive;
                }
                scores[c.index()] = logistic(col.latent[i]);
            }
            labels[Condition::NoFinding] = derive_no_finding(&labels, &rule);
            StudyRecord {
                study_id: format!("S{i:07}"),
                patient_id: Some(format!("P{:07}", i / 2)),
                report_text: spec.emit_reports.then(|| templated_report(&labels)),
                labels: Some(labels),
                scores: Some(ScoreSet::new(scores).expect("logistic output lies in [0, 1]")),
            }
        })
        .collect();
    Ok(records)
}
