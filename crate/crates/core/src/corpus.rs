//! Plain-text article corpus reader.
//!
//! Layout: a line starting with `"= "` opens a new article and carries its
//! title (trailing `=` characters are stripped, so `= Title =` also works).
//! Paragraphs are blocks of non-blank lines separated by blank lines; lines
//! inside a block are joined with a single space.

use crate::squad::{Article, Paragraph};
use crate::text;

pub const DEFAULT_MAX_PARAGRAPH_CHARS: usize = 2000;

#[derive(Debug, Clone, Copy)]
pub struct CorpusOptions {
    pub max_paragraph_chars: usize,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        Self { max_paragraph_chars: DEFAULT_MAX_PARAGRAPH_CHARS }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParsedCorpus {
    pub articles: Vec<Article>,
    pub warnings: Vec<String>,
}

pub fn parse_corpus(input: &str) -> ParsedCorpus {
    parse_corpus_with(input, CorpusOptions::default())
}

pub fn parse_corpus_with(input: &str, opts: CorpusOptions) -> ParsedCorpus {
    let mut out = ParsedCorpus::default();
    let mut current: Option<Article> = None;
    let mut block: Vec<&str> = Vec::new();
    let mut orphan_lines = 0usize;

    for (lineno, line) in input.lines().enumerate() {
        if let Some(rest) = line.strip_prefix("= ") {
            flush_block(&mut block, current.as_mut(), &mut orphan_lines, opts, &mut out.warnings);
            finish_article(current.take(), &mut out);
            let title = rest.trim().trim_end_matches('=').trim();
            if title.is_empty() {
                out.warnings.push(format!("line {}: empty article title", lineno + 1));
            }
            current = Some(Article { title: title.to_owned(), paragraphs: Vec::new() });
        } else if line.trim().is_empty() {
            flush_block(&mut block, current.as_mut(), &mut orphan_lines, opts, &mut out.warnings);
        } else {
            block.push(line.trim());
        }
    }
    flush_block(&mut block, current.as_mut(), &mut orphan_lines, opts, &mut out.warnings);
    finish_article(current.take(), &mut out);
    if orphan_lines > 0 {
        out.warnings.push(format!("{orphan_lines} paragraph(s) before the first title were skipped"));
    }
    out
}

fn flush_block(
    block: &mut Vec<&str>,
    article: Option<&mut Article>,
    orphans: &mut usize,
    opts: CorpusOptions,
    warnings: &mut Vec<String>,
) {
    if block.is_empty() {
        return;
    }
    let joined = block.join(" ");
    block.clear();
    let Some(article) = article else {
        *orphans += 1;
        return;
    };
    let context = if joined.chars().count() > opts.max_paragraph_chars {
        let cut = truncate_paragraph(&joined, opts.max_paragraph_chars);
        warnings.push(format!(
            "article {:?} paragraph {}: truncated from {} to {} characters",
            article.title,
            article.paragraphs.len(),
            joined.chars().count(),
            cut.chars().count()
        ));
        cut.to_owned()
    } else {
        joined
    };
    article.paragraphs.push(Paragraph::new(context));
}

fn finish_article(article: Option<Article>, out: &mut ParsedCorpus) {
    let Some(article) = article else { return };
    if article.paragraphs.is_empty() {
        out.warnings.push(format!("article {:?} has no paragraphs; skipped", article.title));
    } else if !article.title.is_empty() {
        out.articles.push(article);
    }
}

/// Cuts `s` to at most `max_chars` characters, ending at the last sentence
/// boundary that fits. Falls back to a hard cut when no boundary fits.
pub fn truncate_paragraph(s: &str, max_chars: usize) -> &str {
    let limit = text::char_to_byte(s, max_chars).unwrap_or(s.len());
    if limit == s.len() {
        return s;
    }
    text::sentences(s)
        .into_iter()
        .map(|r| r.end)
        .take_while(|&end| end <= limit)
        .last()
        .map_or(&s[..limit], |end| &s[..end])
}
