//! Cloze-to-question translation.
//!
//! [`ClozeTranslator`] is the pluggable contract; [`RuleTranslator`] is the
//! built-in implementation. It fronts a wh-phrase chosen from
//! `(category, mask position)`, drops the mask, and keeps the remaining words
//! in order:
//!
//! | category     | prefix mask          | infix / suffix mask        |
//! |--------------|----------------------|----------------------------|
//! | PERSON       | `Who`                | `Who did`                  |
//! | PLACE        | `What place`         | `Where did`                |
//! | ORGANIZATION | `Which organization` | `Which organization did`   |
//! | DATE         | `When`               | `When did`                 |
//! | NUMBER       | `How many`           | `How many did`             |
//! | THING        | `What`               | `What did`                 |
//!
//! Output always ends in `" ?"`.

use serde::{Deserialize, Serialize};

use super::candidates::Category;
use super::ClozeInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskPosition {
    Prefix,
    Infix,
    Suffix,
}

pub trait ClozeTranslator: Send + Sync {
    fn name(&self) -> &'static str;
    fn translate(&self, cloze: &ClozeInstance, mask_token: &str) -> String;
}

/// Selects a translator by name.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TranslatorKind {
    #[default]
    Rule,
}

impl TranslatorKind {
    pub fn build(self) -> Box<dyn ClozeTranslator> {
        match self {
            TranslatorKind::Rule => Box::new(RuleTranslator),
        }
    }
}

impl std::str::FromStr for TranslatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rule" => Ok(TranslatorKind::Rule),
            other => Err(format!("unknown translator {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RuleTranslator;

/// Sentence-initial words that are lowercased once a wh-phrase is fronted.
const LOWERCASE_ON_FRONTING: &[&str] = &[
    "A", "After", "An", "As", "At", "Before", "By", "During", "Following", "For", "From", "He", "Her", "His", "However",
    "In", "It", "Its", "Meanwhile", "On", "She", "That", "The", "Their", "There", "These", "They", "This", "Those",
    "To", "We", "When", "While", "With",
];

pub fn wh_phrase(category: Category, position: MaskPosition) -> &'static str {
    use Category::*;
    let prefix = position == MaskPosition::Prefix;
    match (category, prefix) {
        (Person, true) => "Who",
        (Person, false) => "Who did",
        (Place, true) => "What place",
        (Place, false) => "Where did",
        (Organization, true) => "Which organization",
        (Organization, false) => "Which organization did",
        (Date, true) => "When",
        (Date, false) => "When did",
        (Number, true) => "How many",
        (Number, false) => "How many did",
        (Thing, true) => "What",
        (Thing, false) => "What did",
    }
}

pub fn mask_position(cloze: &str, mask: &str) -> MaskPosition {
    let body = cloze.trim().trim_end_matches(['.', '?', '!', ',', ';', ':']).trim_end();
    if body.starts_with(mask) {
        MaskPosition::Prefix
    } else if body.ends_with(mask) {
        MaskPosition::Suffix
    } else {
        MaskPosition::Infix
    }
}

fn is_punct_only(tok: &str) -> bool {
    tok.chars().all(|c| c.is_ascii_punctuation())
}

impl ClozeTranslator for RuleTranslator {
    fn name(&self) -> &'static str {
        "rule"
    }

    fn translate(&self, cloze: &ClozeInstance, mask: &str) -> String {
        let position = mask_position(&cloze.cloze_text, mask);
        let removed = cloze.cloze_text.replacen(mask, "", 1);
        let mut words: Vec<String> = removed.split_whitespace().map(str::to_owned).collect();

        // separators and quotes orphaned by the mask
        words.retain(|w| !is_punct_only(w));
        if let Some(last) = words.last_mut() {
            let trimmed = last.trim_end_matches(['.', '?', '!', ',', ';', ':']).len();
            last.truncate(trimmed);
        }
        if position != MaskPosition::Prefix {
            if let Some(first) = words.first_mut() {
                if LOWERCASE_ON_FRONTING.contains(&first.as_str()) {
                    *first = first.to_lowercase();
                }
            }
        }

        let mut out = String::from(wh_phrase(cloze.answer.category, position));
        for w in words.iter().filter(|w| !w.is_empty()) {
            out.push(' ');
            out.push_str(w);
        }
        out.push_str(" ?");
        out
    }
}
