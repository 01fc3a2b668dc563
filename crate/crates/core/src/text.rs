//! Character-offset helpers and the shallow tokenization shared by the
//! generators.
//!
//! SQuAD offsets count Unicode scalar values, not bytes, so everything that
//! crosses the JSON boundary goes through the conversions here.

use std::ops::Range;

/// Byte offset of the `char_idx`-th character, or `None` past the end.
/// `char_idx == char count` maps to `s.len()`.
pub fn char_to_byte(s: &str, char_idx: usize) -> Option<usize> {
    if char_idx == 0 {
        return Some(0);
    }
    let mut seen = 0;
    for (b, _) in s.char_indices() {
        if seen == char_idx {
            return Some(b);
        }
        seen += 1;
    }
    (seen == char_idx).then_some(s.len())
}

pub fn byte_to_char(s: &str, byte: usize) -> usize {
    s[..byte].chars().count()
}

/// Substring of `s` covering `len` characters starting at character `start`.
pub fn char_slice(s: &str, start: usize, len: usize) -> Option<&str> {
    let b0 = char_to_byte(s, start)?;
    let rest = &s[b0..];
    let b1 = char_to_byte(rest, len)?;
    Some(&rest[..b1])
}

/// A whitespace-delimited token with surrounding punctuation trimmed.
/// `range` covers the trimmed core; `raw` covers the whole chunk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub range: Range<usize>,
    pub raw: Range<usize>,
}

impl Token {
    pub fn text<'a>(&self, s: &'a str) -> &'a str {
        &s[self.range.clone()]
    }

    /// Punctuation directly after the core, e.g. the comma in `Nets,`.
    pub fn trailing<'a>(&self, s: &'a str) -> &'a str {
        &s[self.range.end..self.raw.end]
    }

    pub fn leading<'a>(&self, s: &'a str) -> &'a str {
        &s[self.raw.start..self.range.start]
    }
}

fn is_edge_punct(c: char) -> bool {
    c.is_ascii_punctuation() || matches!(c, '“' | '”' | '‘' | '’' | '–' | '—' | '…')
}

/// Splits `s` into tokens. Chunks made only of punctuation are dropped.
pub fn tokenize(s: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices().chain(std::iter::once((s.len(), ' '))) {
        if c.is_whitespace() {
            if let Some(st) = start.take() {
                if let Some(tok) = trim_chunk(s, st..i) {
                    out.push(tok);
                }
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    out
}

fn trim_chunk(s: &str, raw: Range<usize>) -> Option<Token> {
    let chunk = &s[raw.clone()];
    let lead = chunk.len() - chunk.trim_start_matches(is_edge_punct).len();
    let core = chunk[lead..].trim_end_matches(is_edge_punct);
    if core.is_empty() {
        return None;
    }
    let start = raw.start + lead;
    Some(Token { range: start..start + core.len(), raw })
}

/// Sentence spans (byte ranges, trimmed of surrounding whitespace).
///
/// A sentence ends at `.`, `?` or `!` (plus any closing quotes or brackets)
/// when followed by whitespace and then an uppercase letter or an opening
/// quote.
pub fn sentences(s: &str) -> Vec<Range<usize>> {
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut out = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        let (_, c) = chars[i];
        if matches!(c, '.' | '?' | '!') {
            let mut j = i + 1;
            while j < chars.len() && matches!(chars[j].1, '"' | '\'' | ')' | ']' | '”' | '’') {
                j += 1;
            }
            let end = chars.get(j).map_or(s.len(), |&(b, _)| b);
            let mut k = j;
            while k < chars.len() && chars[k].1.is_whitespace() {
                k += 1;
            }
            if k > j && k < chars.len() {
                let next = chars[k].1;
                if next.is_uppercase() || matches!(next, '"' | '“' | '\'') {
                    push_trimmed(s, start..end, &mut out);
                    start = chars[k].0;
                    i = k;
                    continue;
                }
            }
        }
        i += 1;
    }
    push_trimmed(s, start..s.len(), &mut out);
    out
}

fn push_trimmed(s: &str, r: Range<usize>, out: &mut Vec<Range<usize>>) {
    let piece = &s[r.clone()];
    let lead = piece.len() - piece.trim_start().len();
    let body = piece.trim();
    if !body.is_empty() {
        let st = r.start + lead;
        out.push(st..st + body.len());
    }
}
