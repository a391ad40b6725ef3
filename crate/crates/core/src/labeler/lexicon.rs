//! Trigger phrases and cue lists driving the labeler.
//!
//! Lexicon files are UTF-8, one entry per line:
//!
//! ```text
//! <stage>\t<condition-or-GLOBAL>\t<phrase>[\t<scope>]
//! ```
//!
//! `stage` is one of `mention`, `pre_neg`, `post_neg`, `uncertain`. Mention
//! entries name a concrete condition; cue entries use `GLOBAL` or restrict the
//! cue to one condition. The optional `scope` column is a token count or the
//! word `sentence`; it defaults to [`DEFAULT_SCOPE_TOKENS`]. Lines starting
//! with `#` and blank lines are ignored.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::text::phrase_tokens;
use crate::condition::Condition;

pub const DEFAULT_SCOPE_TOKENS: usize = 6;

const BUNDLED: &[(&str, &str)] = &[
    ("mention.tsv", include_str!("../../data/mention.tsv")),
    ("pre_neg.tsv", include_str!("../../data/pre_neg.tsv")),
    ("post_neg.tsv", include_str!("../../data/post_neg.tsv")),
    ("uncertain.tsv", include_str!("../../data/uncertain.tsv")),
];

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("cannot read lexicon file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{source_name}:{line}: {reason}")]
    Parse { source_name: String, line: usize, reason: String },
    #[error("trigger `{phrase}` maps to both {first} and {second}")]
    AmbiguousTrigger { phrase: String, first: Condition, second: Condition },
    #[error("cue `{phrase}` is also a trigger phrase")]
    CueIsTrigger { phrase: String },
    #[error("lexicon has no trigger phrases")]
    Empty,
}

/// Classification stage a cue belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CueKind {
    PreNegation,
    PostNegation,
    Uncertainty,
}

impl CueKind {
    pub fn stage_name(self) -> &'static str {
        match self {
            CueKind::PreNegation => "pre_neg",
            CueKind::PostNegation => "post_neg",
            CueKind::Uncertainty => "uncertain",
        }
    }
}

/// How far a cue reaches from the mention boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    /// At most this many tokens between cue and mention.
    Tokens(usize),
    /// Anywhere in the same sentence.
    Sentence,
}

impl Scope {
    pub fn admits(self, gap: usize) -> bool {
        match self {
            Scope::Tokens(n) => gap <= n,
            Scope::Sentence => true,
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Tokens(n) => write!(f, "{n}"),
            Scope::Sentence => f.write_str("sentence"),
        }
    }
}

impl FromStr for Scope {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("sentence") {
            return Ok(Scope::Sentence);
        }
        s.parse::<usize>()
            .map(Scope::Tokens)
            .map_err(|_| format!("invalid scope `{s}` (expected a token count or `sentence`)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trigger {
    pub phrase: String,
    pub tokens: Vec<String>,
    pub condition: Condition,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cue {
    pub kind: CueKind,
    pub phrase: String,
    pub tokens: Vec<String>,
    /// `None` for global cues.
    pub condition: Option<Condition>,
    pub scope: Scope,
}

impl Cue {
    pub fn applies_to(&self, condition: Condition) -> bool {
        self.condition.is_none_or(|c| c == condition)
    }

    /// Identifier recorded in [`Mention::rule_fired`](super::Mention::rule_fired).
    pub fn rule_id(&self) -> String {
        format!("{}:{}", self.kind.stage_name(), self.phrase)
    }
}

/// A validated, immutable lexicon.
#[derive(Debug, Clone)]
pub struct Lexicon {
    triggers: Vec<Trigger>,
    /// First token -> trigger indices, longest phrase first.
    by_first_token: HashMap<String, Vec<usize>>,
    cues: Vec<Cue>,
}

impl Lexicon {
    /// The English lexicon shipped with the crate.
    pub fn bundled() -> Lexicon {
        Lexicon::from_sources(BUNDLED.iter().copied()).expect("bundled lexicon is valid")
    }

    /// The raw bundled files, as `(file name, contents)`.
    pub fn bundled_sources() -> &'static [(&'static str, &'static str)] {
        BUNDLED
    }

    /// Loads and merges one or more lexicon files.
    pub fn load<P: AsRef<Path>>(paths: &[P]) -> Result<Lexicon, LexiconError> {
        let mut sources = Vec::with_capacity(paths.len());
        for p in paths {
            let p = p.as_ref();
            let text =
                std::fs::read_to_string(p).map_err(|source| LexiconError::Io { path: p.to_path_buf(), source })?;
            sources.push((p.display().to_string(), text));
        }
        Lexicon::from_sources(sources.iter().map(|(n, t)| (n.as_str(), t.as_str())))
    }

    /// Parses `(source name, text)` pairs; the name only appears in error messages.
    pub fn from_sources<'a, I>(sources: I) -> Result<Lexicon, LexiconError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut triggers = Vec::new();
        let mut cues = Vec::new();
        for (name, text) in sources {
            parse_source(name, text, &mut triggers, &mut cues)?;
        }
        Lexicon::new(triggers, cues)
    }

    /// Validates and indexes. Duplicate entries for the same condition are merged.
    pub fn new(triggers: Vec<Trigger>, cues: Vec<Cue>) -> Result<Lexicon, LexiconError> {
        let mut owner: HashMap<Vec<String>, Condition> = HashMap::new();
        let mut unique = Vec::with_capacity(triggers.len());
        for t in triggers {
            match owner.get(&t.tokens) {
                Some(&c) if c == t.condition => continue,
                Some(&c) => {
                    return Err(LexiconError::AmbiguousTrigger { phrase: t.phrase, first: c, second: t.condition })
                }
                None => {
                    owner.insert(t.tokens.clone(), t.condition);
                    unique.push(t);
                }
            }
        }
        if unique.is_empty() {
            return Err(LexiconError::Empty);
        }
        if let Some(c) = cues.iter().find(|c| owner.contains_key(&c.tokens)) {
            return Err(LexiconError::CueIsTrigger { phrase: c.phrase.clone() });
        }

        let mut by_first_token: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, t) in unique.iter().enumerate() {
            by_first_token.entry(t.tokens[0].clone()).or_default().push(i);
        }
        for ids in by_first_token.values_mut() {
            // longest first; ties keep file order
            ids.sort_by_key(|&i| std::cmp::Reverse(unique[i].tokens.len()));
        }
        Ok(Lexicon { triggers: unique, by_first_token, cues })
    }

    pub fn triggers(&self) -> &[Trigger] {
        &self.triggers
    }

    pub fn cues(&self) -> &[Cue] {
        &self.cues
    }

    pub fn cues_of(&self, kind: CueKind) -> impl Iterator<Item = &Cue> {
        self.cues.iter().filter(move |c| c.kind == kind)
    }

    /// Longest trigger starting at `tokens[at]`, returned as (trigger, token length).
    pub fn longest_match_at(&self, tokens: &[&str], at: usize) -> Option<(&Trigger, usize)> {
        let ids = self.by_first_token.get(tokens[at])?;
        ids.iter().map(|&i| &self.triggers[i]).find_map(|t| {
            let n = t.tokens.len();
            (at + n <= tokens.len() && t.tokens.iter().zip(&tokens[at..at + n]).all(|(a, b)| a == b)).then_some((t, n))
        })
    }
}

fn parse_source(name: &str, text: &str, triggers: &mut Vec<Trigger>, cues: &mut Vec<Cue>) -> Result<(), LexiconError> {
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let err = |reason: String| LexiconError::Parse { source_name: name.to_string(), line: lineno + 1, reason };
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(err(format!("expected 3 or 4 tab-separated fields, found {}", fields.len())));
        }
        let phrase = fields[2].to_lowercase();
        let tokens = phrase_tokens(&phrase);
        if tokens.is_empty() {
            return Err(err("empty phrase".into()));
        }
        let target = if fields[1].eq_ignore_ascii_case("GLOBAL") {
            None
        } else {
            Some(fields[1].parse::<Condition>().map_err(|e| err(e.to_string()))?)
        };
        if target == Some(Condition::NoFinding) {
            return Err(err("NoFinding is derived and cannot be a lexicon target".into()));
        }
        let scope = match fields.get(3) {
            Some(s) if !s.is_empty() => s.parse::<Scope>().map_err(err)?,
            _ => Scope::Tokens(DEFAULT_SCOPE_TOKENS),
        };
        let kind = match fields[0] {
            "mention" => {
                let condition = target.ok_or_else(|| err("mention entries need a condition".into()))?;
                if fields.len() == 4 {
                    return Err(err("mention entries take no scope".into()));
                }
                triggers.push(Trigger { phrase, tokens, condition });
                continue;
            }
            "pre_neg" => CueKind::PreNegation,
            "post_neg" => CueKind::PostNegation,
            "uncertain" => CueKind::Uncertainty,
            other => return Err(err(format!("unknown stage `{other}`"))),
        };
        cues.push(Cue { kind, phrase, tokens, condition: target, scope });
    }
    Ok(())
}
