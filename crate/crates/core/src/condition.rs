//! Condition vocabulary and the 4-state report label.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The 13 radiographic abnormalities plus the derived `NoFinding` pseudo-condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    Atelectasis,
    Cardiomegaly,
    Consolidation,
    Edema,
    LungOpacity,
    Pneumonia,
    PleuralEffusion,
    Pneumothorax,
    PleuralOther,
    Hernia,
    Emphysema,
    Fracture,
    SupportDevices,
    NoFinding,
}

impl Condition {
    /// Every member, in table order. `NoFinding` is last.
    pub const ALL: [Condition; 14] = [
        Condition::Atelectasis,
        Condition::Cardiomegaly,
        Condition::Consolidation,
        Condition::Edema,
        Condition::LungOpacity,
        Condition::Pneumonia,
        Condition::PleuralEffusion,
        Condition::Pneumothorax,
        Condition::PleuralOther,
        Condition::Hernia,
        Condition::Emphysema,
        Condition::Fracture,
        Condition::SupportDevices,
        Condition::NoFinding,
    ];

    /// The 13 conditions that can be mentioned in a report and scored by a model.
    pub const OBSERVED: [Condition; 13] = [
        Condition::Atelectasis,
        Condition::Cardiomegaly,
        Condition::Consolidation,
        Condition::Edema,
        Condition::LungOpacity,
        Condition::Pneumonia,
        Condition::PleuralEffusion,
        Condition::Pneumothorax,
        Condition::PleuralOther,
        Condition::Hernia,
        Condition::Emphysema,
        Condition::Fracture,
        Condition::SupportDevices,
    ];

    /// Position in [`Condition::ALL`]. Stable across releases; used as the RNG stream id.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_observed(self) -> bool {
        self != Condition::NoFinding
    }

    /// Identifier used in CSV column names and lexicon files.
    pub fn name(self) -> &'static str {
        match self {
            Condition::Atelectasis => "Atelectasis",
            Condition::Cardiomegaly => "Cardiomegaly",
            Condition::Consolidation => "Consolidation",
            Condition::Edema => "Edema",
            Condition::LungOpacity => "LungOpacity",
            Condition::Pneumonia => "Pneumonia",
            Condition::PleuralEffusion => "PleuralEffusion",
            Condition::Pneumothorax => "Pneumothorax",
            Condition::PleuralOther => "PleuralOther",
            Condition::Hernia => "Hernia",
            Condition::Emphysema => "Emphysema",
            Condition::Fracture => "Fracture",
            Condition::SupportDevices => "SupportDevices",
            Condition::NoFinding => "NoFinding",
        }
    }

    /// Human-readable name, as printed in rendered tables.
    pub fn display_name(self) -> &'static str {
        match self {
            Condition::LungOpacity => "Lung Opacity",
            Condition::PleuralEffusion => "Pleural Effusion",
            Condition::PleuralOther => "Pleural Other",
            Condition::SupportDevices => "Support Devices",
            Condition::NoFinding => "No Finding",
            other => other.name(),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown condition `{0}`")]
pub struct UnknownCondition(pub String);

impl FromStr for Condition {
    type Err = UnknownCondition;

    /// Accepts `PleuralEffusion`, `pleural effusion`, `pleural_effusion`, any case.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| !matches!(c, ' ' | '_' | '-')).flat_map(char::to_lowercase).collect();
        Condition::ALL
            .into_iter()
            .find(|c| c.name().to_ascii_lowercase() == key)
            .ok_or_else(|| UnknownCondition(s.to_string()))
    }
}

/// Report-level label for one condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label4 {
    Positive,
    Negative,
    Uncertain,
    NoMention,
}

impl Label4 {
    pub const ALL: [Label4; 4] = [Label4::Positive, Label4::Negative, Label4::Uncertain, Label4::NoMention];

    /// CSV code: `POS`, `NEG`, `UNC` or `NOMENTION`.
    pub fn code(self) -> &'static str {
        match self {
            Label4::Positive => "POS",
            Label4::Negative => "NEG",
            Label4::Uncertain => "UNC",
            Label4::NoMention => "NOMENTION",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Label4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown label `{0}` (expected POS, NEG, UNC or NOMENTION)")]
pub struct UnknownLabel(pub String);

impl FromStr for Label4 {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "POS" => Ok(Label4::Positive),
            "NEG" => Ok(Label4::Negative),
            "UNC" => Ok(Label4::Uncertain),
            "NOMENTION" => Ok(Label4::NoMention),
            _ => Err(UnknownLabel(s.to_string())),
        }
    }
}

/// A complete label assignment over all 14 conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabelSet([Label4; 14]);

impl LabelSet {
    pub fn new(labels: [Label4; 14]) -> Self {
        LabelSet(labels)
    }

    pub fn all(label: Label4) -> Self {
        LabelSet([label; 14])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Condition, Label4)> + '_ {
        Condition::ALL.into_iter().zip(self.0.iter().copied())
    }

    pub fn as_array(&self) -> &[Label4; 14] {
        &self.0
    }
}

impl Default for LabelSet {
    fn default() -> Self {
        LabelSet::all(Label4::NoMention)
    }
}

impl Index<Condition> for LabelSet {
    type Output = Label4;
    fn index(&self, c: Condition) -> &Label4 {
        &self.0[c.index()]
    }
}

impl IndexMut<Condition> for LabelSet {
    fn index_mut(&mut self, c: Condition) -> &mut Label4 {
        &mut self.0[c.index()]
    }
}

/// Model scores in `[0, 1]` for the 13 observed conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreSet([f64; 13]);

impl ScoreSet {
    /// Returns `None` if any value is outside `[0, 1]` or not finite.
    pub fn new(scores: [f64; 13]) -> Option<Self> {
        scores.iter().all(|s| (0.0..=1.0).contains(s)).then_some(ScoreSet(scores))
    }

    /// Panics on `NoFinding`, which has no score.
    pub fn get(&self, c: Condition) -> f64 {
        assert!(c.is_observed(), "NoFinding carries no score");
        self.0[c.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Condition, f64)> + '_ {
        Condition::OBSERVED.into_iter().zip(self.0.iter().copied())
    }

    pub fn as_array(&self) -> &[f64; 13] {
        &self.0
    }
}
