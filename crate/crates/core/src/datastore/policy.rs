use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::condition::Label4;

/// Ground truth after binarization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Truth {
    Positive,
    Negative,
    Excluded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UncertainPolicy {
    AsPositive,
    AsNegative,
    Excluded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NoMentionPolicy {
    AsNegative,
    Excluded,
}

/// How `Uncertain` and `NoMention` labels are binarized for evaluation.
///
/// Written as `uncertain-<positive|negative|exclude>,nomention-<negative|exclude>`.
/// The default is `uncertain-exclude,nomention-negative`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct LabelPolicy {
    pub uncertain: UncertainPolicy,
    pub no_mention: NoMentionPolicy,
}

impl Default for LabelPolicy {
    fn default() -> Self {
        LabelPolicy { uncertain: UncertainPolicy::Excluded, no_mention: NoMentionPolicy::AsNegative }
    }
}

impl LabelPolicy {
    pub fn apply(self, label: Label4) -> Truth {
        match label {
            Label4::Positive => Truth::Positive,
            Label4::Negative => Truth::Negative,
            Label4::Uncertain => match self.uncertain {
                UncertainPolicy::AsPositive => Truth::Positive,
                UncertainPolicy::AsNegative => Truth::Negative,
                UncertainPolicy::Excluded => Truth::Excluded,
            },
            Label4::NoMention => match self.no_mention {
                NoMentionPolicy::AsNegative => Truth::Negative,
                NoMentionPolicy::Excluded => Truth::Excluded,
            },
        }
    }
}

/// Free-function form of [`LabelPolicy::apply`].
pub fn apply_label_policy(label: Label4, policy: LabelPolicy) -> Truth {
    policy.apply(label)
}

impl fmt::Display for LabelPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u = match self.uncertain {
            UncertainPolicy::AsPositive => "uncertain-positive",
            UncertainPolicy::AsNegative => "uncertain-negative",
            UncertainPolicy::Excluded => "uncertain-exclude",
        };
        let m = match self.no_mention {
            NoMentionPolicy::AsNegative => "nomention-negative",
            NoMentionPolicy::Excluded => "nomention-exclude",
        };
        write!(f, "{u},{m}")
    }
}

impl FromStr for LabelPolicy {
    type Err = String;

    /// Either half may be omitted and falls back to the default.
    fn from_str(s: &str) -> Result<Self, String> {
        let mut policy = LabelPolicy::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.to_ascii_lowercase().as_str() {
                "uncertain-positive" => policy.uncertain = UncertainPolicy::AsPositive,
                "uncertain-negative" => policy.uncertain = UncertainPolicy::AsNegative,
                "uncertain-exclude" => policy.uncertain = UncertainPolicy::Excluded,
                "nomention-negative" => policy.no_mention = NoMentionPolicy::AsNegative,
                "nomention-exclude" => policy.no_mention = NoMentionPolicy::Excluded,
                other => return Err(format!("unknown policy component `{other}`")),
            }
        }
        Ok(policy)
    }
}

impl From<LabelPolicy> for String {
    fn from(p: LabelPolicy) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for LabelPolicy {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}
