//! Sentence segmentation and tokenization for report text.

use serde::{Deserialize, Serialize};

/// Abbreviations whose trailing period never ends a sentence.
pub const ABBREVIATIONS: &[&str] =
    &["dr.", "e.g.", "i.e.", "vs.", "approx.", "cf.", "mr.", "mrs.", "ms.", "fig.", "st."];

/// A sentence with its byte offsets into the original report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

/// A lower-cased word token with byte offsets into the text it was cut from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub norm: String,
    pub start: usize,
    pub end: usize,
}

/// Splits on Unicode whitespace and punctuation. Tokens are maximal runs of
/// alphanumeric characters, lower-cased.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        if ch.is_alphanumeric() {
            start.get_or_insert(i);
        } else if let Some(s) = start.take() {
            tokens.push(Token { norm: text[s..i].to_lowercase(), start: s, end: i });
        }
    }
    if let Some(s) = start {
        tokens.push(Token { norm: text[s..].to_lowercase(), start: s, end: text.len() });
    }
    tokens
}

/// Lower-cased token strings of a phrase, as used for lexicon matching.
pub fn phrase_tokens(phrase: &str) -> Vec<String> {
    tokenize(phrase).into_iter().map(|t| t.norm).collect()
}

/// Splits a report into sentences.
///
/// Boundaries are newlines and any of `. ! ? ;` followed by whitespace or the
/// end of the text. A period does not end a sentence when it closes a known
/// abbreviation or a leading list enumerator such as `2.`. Sentences are
/// trimmed and keep their terminal punctuation; blank segments are dropped.
pub fn segment_sentences(text: &str) -> Vec<Sentence> {
    let mut out = Vec::new();
    let mut seg_start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, ch)) = chars.next() {
        let boundary = match ch {
            '\n' | '\r' => Some(i),
            '.' | '!' | '?' | ';' => {
                let followed_by_space = chars.peek().is_none_or(|&(_, next)| next.is_whitespace());
                let end = i + ch.len_utf8();
                if !followed_by_space
                    || (ch == '.' && (closes_abbreviation(text, end) || is_enumerator(&text[seg_start..i])))
                {
                    None
                } else {
                    Some(end)
                }
            }
            _ => None,
        };
        if let Some(end) = boundary {
            push_trimmed(&mut out, text, seg_start, end);
            seg_start = end;
        }
    }
    push_trimmed(&mut out, text, seg_start, text.len());
    out
}

fn push_trimmed(out: &mut Vec<Sentence>, text: &str, start: usize, end: usize) {
    let raw = &text[start..end];
    let lead = raw.len() - raw.trim_start().len();
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return;
    }
    let s = start + lead;
    out.push(Sentence { text: trimmed.to_string(), start: s, end: s + trimmed.len() });
}

/// `end` is the byte offset just past a period.
fn closes_abbreviation(text: &str, end: usize) -> bool {
    let word_start = text[..end]
        .char_indices()
        .rev()
        .find(|(_, c)| c.is_whitespace() || *c == '(')
        .map_or(0, |(i, c)| i + c.len_utf8());
    let word = text[word_start..end].to_lowercase();
    ABBREVIATIONS.contains(&word.as_str())
}

fn is_enumerator(before_period: &str) -> bool {
    let s = before_period.trim();
    !s.is_empty() && s.len() <= 3 && s.chars().all(|c| c.is_ascii_digit())
}
