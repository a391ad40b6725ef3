//! Rule-based report labeler.
//!
//! Three stages run per report: trigger phrases are located in each sentence
//! (mention extraction), each mention gets a polarity from the negation and
//! uncertainty cues around it (classification), and the mentions are folded
//! into one [`Label4`] per condition (aggregation). `NoFinding` is derived from
//! the aggregate afterwards.

mod lexicon;
mod text;

pub use lexicon::{Cue, CueKind, Lexicon, LexiconError, Scope, Trigger, DEFAULT_SCOPE_TOKENS};
pub use text::{phrase_tokens, segment_sentences, tokenize, Sentence, Token, ABBREVIATIONS};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condition::{Condition, Label4, LabelSet};

/// Polarity of a single mention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
    Uncertain,
}

impl Polarity {
    fn rank(self) -> u8 {
        match self {
            Polarity::Negative => 0,
            Polarity::Uncertain => 1,
            Polarity::Positive => 2,
        }
    }
}

impl From<Polarity> for Label4 {
    fn from(p: Polarity) -> Label4 {
        match p {
            Polarity::Positive => Label4::Positive,
            Polarity::Negative => Label4::Negative,
            Polarity::Uncertain => Label4::Uncertain,
        }
    }
}

pub const DEFAULT_RULE: &str = "default-positive";

/// One trigger-phrase occurrence inside a sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mention {
    pub condition: Condition,
    pub sentence_index: usize,
    /// Half-open byte offsets into the sentence text.
    pub char_span: (usize, usize),
    /// The sentence text covered by `char_span`.
    pub matched_phrase: String,
    pub polarity: Polarity,
    pub rule_fired: String,
}

/// Finds every non-overlapping, leftmost-longest trigger occurrence.
///
/// Returned mentions carry the default polarity; run [`classify_mention`] next.
pub fn extract_mentions(sentences: &[Sentence], lexicon: &Lexicon) -> Vec<Mention> {
    let mut out = Vec::new();
    for (sentence_index, sentence) in sentences.iter().enumerate() {
        let tokens = tokenize(&sentence.text);
        let norms: Vec<&str> = tokens.iter().map(|t| t.norm.as_str()).collect();
        let mut i = 0;
        while i < norms.len() {
            match lexicon.longest_match_at(&norms, i) {
                Some((trigger, len)) => {
                    let span = (tokens[i].start, tokens[i + len - 1].end);
                    out.push(Mention {
                        condition: trigger.condition,
                        sentence_index,
                        char_span: span,
                        matched_phrase: sentence.text[span.0..span.1].to_string(),
                        polarity: Polarity::Positive,
                        rule_fired: DEFAULT_RULE.to_string(),
                    });
                    i += len;
                }
                None => i += 1,
            }
        }
    }
    out
}

/// Assigns polarity from the cues around the mention.
///
/// Stages are tried in order and the first that fires wins: a pre-negation cue
/// ending before the mention, a post-negation cue starting after it, then an
/// uncertainty cue on either side. Within a stage the cue nearest to the
/// mention wins, then the longer cue. A cue is in scope when the number of
/// tokens between it and the mention is within the cue's scope.
pub fn classify_mention(mut mention: Mention, sentence: &str, lexicon: &Lexicon) -> Mention {
    let tokens = tokenize(sentence);
    let (span_start, span_end) = mention.char_span;
    let first = tokens.iter().position(|t| t.start >= span_start);
    let last = tokens.iter().rposition(|t| t.end <= span_end);
    let (m_start, m_end) = match (first, last) {
        (Some(f), Some(l)) if f <= l => (f, l + 1),
        _ => return mention,
    };
    let norms: Vec<&str> = tokens.iter().map(|t| t.norm.as_str()).collect();

    for kind in [CueKind::PreNegation, CueKind::PostNegation, CueKind::Uncertainty] {
        let mut best: Option<(usize, std::cmp::Reverse<usize>, &Cue)> = None;
        for cue in lexicon.cues_of(kind).filter(|c| c.applies_to(mention.condition)) {
            for at in occurrences(&norms, &cue.tokens) {
                let end = at + cue.tokens.len();
                let gap = if end <= m_start && kind != CueKind::PostNegation {
                    m_start - end
                } else if at >= m_end && kind != CueKind::PreNegation {
                    at - m_end
                } else {
                    continue;
                };
                if !cue.scope.admits(gap) {
                    continue;
                }
                let key = (gap, std::cmp::Reverse(cue.tokens.len()), cue);
                if best.as_ref().is_none_or(|b| (key.0, key.1) < (b.0, b.1)) {
                    best = Some(key);
                }
            }
        }
        if let Some((_, _, cue)) = best {
            mention.polarity = match kind {
                CueKind::Uncertainty => Polarity::Uncertain,
                _ => Polarity::Negative,
            };
            mention.rule_fired = cue.rule_id();
            return mention;
        }
    }
    mention.polarity = Polarity::Positive;
    mention.rule_fired = DEFAULT_RULE.to_string();
    mention
}

fn occurrences<'a>(haystack: &'a [&str], needle: &'a [String]) -> impl Iterator<Item = usize> + 'a {
    let n = needle.len();
    (0..haystack.len().saturating_sub(n - 1))
        .filter(move |&i| haystack[i..i + n].iter().zip(needle).all(|(a, b)| *a == b))
}

/// Folds classified mentions into one label per condition.
///
/// Precedence is Positive > Uncertain > Negative; unmentioned conditions are
/// `NoMention`. The `NoFinding` slot is left as `NoMention`.
pub fn aggregate_labels(mentions: &[Mention]) -> LabelSet {
    let mut best: [Option<Polarity>; 14] = [None; 14];
    for m in mentions {
        let slot = &mut best[m.condition.index()];
        if slot.is_none_or(|p| m.polarity.rank() > p.rank()) {
            *slot = Some(m.polarity);
        }
    }
    let mut labels = LabelSet::default();
    for c in Condition::OBSERVED {
        if let Some(p) = best[c.index()] {
            labels[c] = p.into();
        }
    }
    labels
}

/// Which conditions count as a finding when deriving `NoFinding`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoFindingRule {
    pub counted: Vec<Condition>,
}

impl Default for NoFindingRule {
    /// Every observed condition except `SupportDevices`.
    fn default() -> Self {
        NoFindingRule { counted: Condition::OBSERVED.into_iter().filter(|&c| c != Condition::SupportDevices).collect() }
    }
}

/// `Positive` when no counted condition is Positive or Uncertain, else `NoMention`.
pub fn derive_no_finding(labels: &LabelSet, rule: &NoFindingRule) -> Label4 {
    let finding = rule
        .counted
        .iter()
        .filter(|c| c.is_observed())
        .any(|&c| matches!(labels[c], Label4::Positive | Label4::Uncertain));
    if finding {
        Label4::NoMention
    } else {
        Label4::Positive
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledReport {
    pub labels: LabelSet,
    pub mentions: Vec<Mention>,
}

/// A lexicon paired with a `NoFinding` rule.
#[derive(Debug, Clone)]
pub struct Labeler {
    lexicon: Lexicon,
    no_finding: NoFindingRule,
}

impl Labeler {
    pub fn new(lexicon: Lexicon) -> Self {
        Labeler { lexicon, no_finding: NoFindingRule::default() }
    }

    pub fn with_no_finding_rule(mut self, rule: NoFindingRule) -> Self {
        self.no_finding = rule;
        self
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn label(&self, report: &str) -> LabeledReport {
        run_pipeline(report, &self.lexicon, &self.no_finding)
    }

    /// Labels many reports in parallel; output order follows input order.
    pub fn label_all<S: AsRef<str> + Sync>(&self, reports: &[S]) -> Vec<LabeledReport> {
        reports.par_iter().map(|r| self.label(r.as_ref())).collect()
    }
}

/// Labels one report with the default `NoFinding` rule.
pub fn label_report(report: &str, lexicon: &Lexicon) -> LabeledReport {
    run_pipeline(report, lexicon, &NoFindingRule::default())
}

fn run_pipeline(report: &str, lexicon: &Lexicon, rule: &NoFindingRule) -> LabeledReport {
    let sentences = segment_sentences(report);
    let mentions: Vec<Mention> = extract_mentions(&sentences, lexicon)
        .into_iter()
        .map(|m| {
            let sentence = &sentences[m.sentence_index].text;
            classify_mention(m, sentence, lexicon)
        })
        .collect();
    let mut labels = aggregate_labels(&mentions);
    labels[Condition::NoFinding] = derive_no_finding(&labels, rule);
    LabeledReport { labels, mentions }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sentences(texts: &[&str]) -> Vec<Sentence> {
        texts.iter().map(|t| Sentence { text: t.to_string(), start: 0, end: t.len() }).collect()
    }

    fn mention(condition: Condition, polarity: Polarity) -> Mention {
        Mention {
            condition,
            sentence_index: 0,
            char_span: (0, 1),
            matched_phrase: "x".into(),
            polarity,
            rule_fired: DEFAULT_RULE.into(),
        }
    }

    fn classify(sentence: &str, phrase: &str) -> Mention {
        let lex = Lexicon::bundled();
        let ms = extract_mentions(&sentences(&[sentence]), &lex);
        let m = ms
            .into_iter()
            .find(|m| m.matched_phrase.eq_ignore_ascii_case(phrase))
            .unwrap_or_else(|| panic!("no mention `{phrase}` in `{sentence}`"));
        classify_mention(m, sentence, &lex)
    }

    #[test]
    fn no_trigger_no_mentions() {
        let lex = Lexicon::from_sources([("t", "mention\tCardiomegaly\tcardiomegaly\n")]).unwrap();
        assert!(extract_mentions(&sentences(&["Heart size normal."]), &lex).is_empty());
    }

    #[test]
    fn extracts_two_conditions() {
        let ms = extract_mentions(&sentences(&["Moderate cardiomegaly with pleural effusion."]), &Lexicon::bundled());
        let conds: Vec<_> = ms.iter().map(|m| m.condition).collect();
        assert_eq!(conds, [Condition::Cardiomegaly, Condition::PleuralEffusion]);
        assert_eq!(ms[1].matched_phrase, "pleural effusion");
        assert_eq!(ms[1].char_span, (27, 43));
    }

    #[test]
    fn longest_match_without_overlap() {
        let lex = Lexicon::from_sources([(
            "t",
            "mention\tPleuralEffusion\tpleural effusion\nmention\tPleuralEffusion\teffusion\n",
        )])
        .unwrap();
        let s = "Pleural effusion and effusion noted.";
        let ms = extract_mentions(&sentences(&[s]), &lex);
        let spans: Vec<_> = ms.iter().map(|m| (m.char_span, m.matched_phrase.as_str())).collect();
        assert_eq!(spans, [((0, 16), "Pleural effusion"), ((21, 29), "effusion")]);
    }

    #[test]
    fn pre_negation() {
        let m = classify("No pleural effusion.", "pleural effusion");
        assert_eq!(m.polarity, Polarity::Negative);
        assert_eq!(m.rule_fired, "pre_neg:no");
    }

    #[test]
    fn uncertainty() {
        let m = classify("Possible pneumonia in the right lower lobe.", "pneumonia");
        assert_eq!(m.polarity, Polarity::Uncertain);
        assert_eq!(m.rule_fired, "uncertain:possible");
    }

    #[test]
    fn default_positive() {
        let m = classify("Cardiomegaly is present.", "cardiomegaly");
        assert_eq!(m.polarity, Polarity::Positive);
        assert_eq!(m.rule_fired, DEFAULT_RULE);
    }

    #[test]
    fn post_negation() {
        let m = classify("The pneumothorax has resolved.", "pneumothorax");
        assert_eq!((m.polarity, m.rule_fired.as_str()), (Polarity::Negative, "post_neg:has resolved"));
    }

    #[test]
    fn nearest_cue_wins_and_negation_beats_uncertainty() {
        let m = classify("No evidence of pneumonia.", "pneumonia");
        assert_eq!(m.rule_fired, "pre_neg:no evidence of");
        let m = classify("Possibly no pneumothorax.", "pneumothorax");
        assert_eq!(m.polarity, Polarity::Negative);
    }

    #[test]
    fn cue_outside_scope_is_ignored() {
        // "no" is 7 tokens before the mention.
        let m = classify("No change in the appearance of the chest with cardiomegaly.", "cardiomegaly");
        assert_eq!(m.polarity, Polarity::Positive);
        let m = classify("No change in the appearance of the cardiomegaly.", "cardiomegaly");
        assert_eq!(m.polarity, Polarity::Negative);
    }

    #[test]
    fn pre_cues_only_look_forward() {
        let m = classify("Cardiomegaly, no effusion.", "cardiomegaly");
        assert_eq!(m.polarity, Polarity::Positive);
    }

    #[test]
    fn condition_restricted_cue() {
        let lex =
            Lexicon::from_sources([("t", "mention\tEdema\tedema\nmention\tHernia\thernia\nuncertain\tEdema\tmild\n")])
                .unwrap();
        let s = "Mild edema. Mild hernia.";
        let r = label_report(s, &lex);
        assert_eq!(r.labels[Condition::Edema], Label4::Uncertain);
        assert_eq!(r.labels[Condition::Hernia], Label4::Positive);
    }

    #[test]
    fn aggregation_precedence() {
        let labels = aggregate_labels(&[]);
        assert!(Condition::OBSERVED.iter().all(|&c| labels[c] == Label4::NoMention));

        let labels = aggregate_labels(&[
            mention(Condition::Pneumonia, Polarity::Uncertain),
            mention(Condition::Pneumonia, Polarity::Positive),
        ]);
        assert_eq!(labels[Condition::Pneumonia], Label4::Positive);

        let labels = aggregate_labels(&[
            mention(Condition::Edema, Polarity::Negative),
            mention(Condition::Edema, Polarity::Uncertain),
        ]);
        assert_eq!(labels[Condition::Edema], Label4::Uncertain);
    }

    #[test]
    fn no_finding_derivation() {
        let rule = NoFindingRule::default();
        let mut labels = LabelSet::default();
        assert_eq!(derive_no_finding(&labels, &rule), Label4::Positive);
        labels[Condition::Cardiomegaly] = Label4::Positive;
        assert_eq!(derive_no_finding(&labels, &rule), Label4::NoMention);

        let mut labels = LabelSet::default();
        labels[Condition::Pneumonia] = Label4::Uncertain;
        assert_eq!(derive_no_finding(&labels, &rule), Label4::NoMention);

        let mut labels = LabelSet::default();
        labels[Condition::Edema] = Label4::Negative;
        labels[Condition::SupportDevices] = Label4::Positive;
        assert_eq!(derive_no_finding(&labels, &rule), Label4::Positive);
        labels[Condition::Fracture] = Label4::Positive;
        assert_eq!(derive_no_finding(&labels, &rule), Label4::NoMention);

        let everything = NoFindingRule { counted: Condition::OBSERVED.to_vec() };
        let mut labels = LabelSet::default();
        labels[Condition::SupportDevices] = Label4::Positive;
        assert_eq!(derive_no_finding(&labels, &everything), Label4::NoMention);
    }

    #[test]
    fn full_reports() {
        let lex = Lexicon::bundled();
        let r = label_report("No acute cardiopulmonary disease.", &lex);
        assert!(Condition::OBSERVED.iter().all(|&c| matches!(r.labels[c], Label4::NoMention | Label4::Negative)));
        assert_eq!(r.labels[Condition::NoFinding], Label4::Positive);

        let r = label_report("", &lex);
        assert_eq!(r.labels, {
            let mut l = LabelSet::default();
            l[Condition::NoFinding] = Label4::Positive;
            l
        });

        let r = label_report("Large right pleural effusion. Cannot exclude pneumonia.", &lex);
        assert_eq!(r.labels[Condition::PleuralEffusion], Label4::Positive);
        assert_eq!(r.labels[Condition::Pneumonia], Label4::Uncertain);
        assert_eq!(r.labels[Condition::NoFinding], Label4::NoMention);
        assert_eq!(r.mentions.len(), 2);
    }

    #[test]
    fn labeler_matches_free_function_and_parallel_batch() {
        let labeler = Labeler::new(Lexicon::bundled());
        let reports = [
            "Cardiomegaly. No edema.",
            "Possible left basilar atelectasis versus consolidation.",
            "",
            "ET tube in place. Pneumothorax is absent.",
        ];
        let batch = labeler.label_all(&reports);
        for (r, b) in reports.iter().zip(&batch) {
            assert_eq!(&labeler.label(r), b);
            assert_eq!(&label_report(r, labeler.lexicon()), b);
        }
    }
}
