//! Rule-based answer candidate extraction.
//!
//! Rules run in a fixed order and each token is claimed by the first rule
//! that matches it:
//!
//! 1. dates: 4-digit years (optionally a decade like `1990s`) and month-name
//!    phrases (`June 4`, `4 June 1996`, `June 4, 1996`, `June 1996`, or a
//!    bare month anywhere but the start of a sentence);
//! 2. numbers: remaining all-digit tokens, with `,`/`.` separators allowed;
//! 3. maximal runs of capitalized tokens that do not start a sentence;
//! 4. capitalized runs that do start a sentence, kept only if the same text
//!    also occurs capitalized mid-sentence. Otherwise the run minus its first
//!    token is treated as a mid-sentence run.
//!
//! Runs never cross punctuation or sentence boundaries.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::squad::AnswerSpan;
use crate::text::{self, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Category {
    Person,
    Place,
    Organization,
    Date,
    Number,
    Thing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerCandidate {
    pub span: AnswerSpan,
    pub category: Category,
}

const MONTHS: [&str; 12] = [
    "January", "February", "March", "April", "May", "June", "July", "August", "September", "October", "November",
    "December",
];

const ORG_SUFFIXES: &[&str] = &[
    "Academy", "Agency", "Airlines", "Army", "Association", "Bank", "Bulls", "Celtics", "Church", "Club", "College",
    "Commission", "Committee", "Company", "Co", "Corp", "Corporation", "Council", "Department", "FC", "Federation",
    "Foundation", "Giants", "Group", "Guild", "Heat", "Inc", "Institute", "Knicks", "Lakers", "League", "Ltd",
    "Ministry", "Navy", "Nets", "Party", "Pistons", "Press", "Records", "School", "Society", "Team", "Times",
    "Union", "University", "Yankees",
];

const PLACE_SUFFIXES: &[&str] = &[
    "Avenue", "Bay", "City", "Coast", "County", "Desert", "Forest", "Harbor", "Harbour", "Island", "Islands",
    "Kingdom", "Lake", "Mountain", "Mountains", "Ocean", "Park", "Peninsula", "Province", "Republic", "River",
    "Road", "Sea", "State", "Street", "Valley",
];

const PLACE_PREFIXES: &[&str] = &["Fort", "Lake", "Mount", "Port", "Saint"];

const PLACES: &[&str] = &[
    "Africa", "America", "Asia", "Australia", "Berlin", "Boston", "California", "Canada", "Chicago", "China",
    "Detroit", "England", "Europe", "France", "Germany", "India", "Italy", "Japan", "London", "Los Angeles",
    "Miami", "Moscow", "New Jersey", "New York", "Paris", "Rome", "Russia", "Spain", "Texas", "Tokyo",
];

fn month_index(s: &str) -> Option<usize> {
    MONTHS.iter().position(|m| *m == s)
}

fn is_year(s: &str) -> bool {
    let digits = s.strip_suffix('s').unwrap_or(s);
    digits.len() == 4
        && digits.bytes().all(|b| b.is_ascii_digit())
        && matches!(digits.as_bytes()[0], b'1' | b'2')
}

fn is_day(s: &str) -> bool {
    s.len() <= 2 && s.bytes().all(|b| b.is_ascii_digit()) && (1..=31).contains(&s.parse::<u32>().unwrap_or(0))
}

fn is_number(s: &str) -> bool {
    s.bytes().all(|b| b.is_ascii_digit() || b == b',' || b == b'.') && s.bytes().any(|b| b.is_ascii_digit())
}

fn is_capitalized(s: &str) -> bool {
    s != "I" && s.chars().next().is_some_and(char::is_uppercase)
}

struct Tokens<'a> {
    ctx: &'a str,
    toks: Vec<Token>,
    /// Sentence index per token.
    sent: Vec<usize>,
    /// True when the token opens its sentence.
    initial: Vec<bool>,
}

impl<'a> Tokens<'a> {
    fn new(ctx: &'a str) -> Self {
        let toks = text::tokenize(ctx);
        let sents = text::sentences(ctx);
        let mut sent = Vec::with_capacity(toks.len());
        let mut initial = Vec::with_capacity(toks.len());
        let mut si = 0;
        let mut last_sent = usize::MAX;
        for t in &toks {
            while si + 1 < sents.len() && t.raw.start >= sents[si + 1].start {
                si += 1;
            }
            sent.push(si);
            initial.push(si != last_sent);
            last_sent = si;
        }
        Self { ctx, toks, sent, initial }
    }

    fn text(&self, i: usize) -> &'a str {
        self.toks[i].text(self.ctx)
    }

    /// Whether tokens `i` and `i + 1` can belong to one phrase.
    fn joinable(&self, i: usize) -> bool {
        i + 1 < self.toks.len()
            && self.sent[i] == self.sent[i + 1]
            && self.toks[i].trailing(self.ctx).is_empty()
            && self.toks[i + 1].leading(self.ctx).is_empty()
    }

    fn joinable_comma(&self, i: usize) -> bool {
        i + 1 < self.toks.len()
            && self.sent[i] == self.sent[i + 1]
            && self.toks[i].trailing(self.ctx) == ","
            && self.toks[i + 1].leading(self.ctx).is_empty()
    }

    fn byte_span(&self, first: usize, last: usize) -> Range<usize> {
        self.toks[first].range.start..self.toks[last].range.end
    }
}

/// Extracts answer candidates from `context` in document order.
pub fn extract_candidates(context: &str) -> Vec<AnswerCandidate> {
    let t = Tokens::new(context);
    let n = t.toks.len();
    let mut claimed = vec![false; n];
    let mut found: Vec<(Range<usize>, Category)> = Vec::new();

    // 1. dates
    let mut i = 0;
    while i < n {
        if let Some(end) = match_date(&t, i) {
            claimed[i..=end].iter_mut().for_each(|c| *c = true);
            found.push((t.byte_span(i, end), Category::Date));
            i = end + 1;
        } else {
            i += 1;
        }
    }

    // 2. numbers
    for i in 0..n {
        if !claimed[i] && is_number(t.text(i)) {
            claimed[i] = true;
            found.push((t.byte_span(i, i), Category::Number));
        }
    }

    // 3 + 4. capitalized runs
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < n {
        if claimed[i] || !is_capitalized(t.text(i)) {
            i += 1;
            continue;
        }
        let start = i;
        while t.joinable(i) && !claimed[i + 1] && is_capitalized(t.text(i + 1)) && !t.initial[i + 1] {
            i += 1;
        }
        runs.push((start, i));
        i += 1;
    }

    let mut caps: Vec<(usize, usize)> = Vec::new();
    for &(s, e) in &runs {
        if !t.initial[s] {
            caps.push((s, e));
        } else if occurs_mid_sentence(&t, s, e) {
            caps.push((s, e));
        } else if e > s {
            caps.push((s + 1, e));
        }
    }

    let texts: Vec<&str> = caps.iter().map(|&(s, e)| &context[t.byte_span(s, e)]).collect();
    let mut persons: Vec<&str> = Vec::new();
    let mut cats: Vec<Category> = Vec::with_capacity(caps.len());
    for &(s, e) in &caps {
        let toks: Vec<&str> = (s..=e).map(|k| t.text(k)).collect();
        let c = categorize(&toks);
        if c == Category::Person {
            persons.push(toks[toks.len() - 1]);
        }
        cats.push(c);
    }
    for ((&(s, e), cat), text) in caps.iter().zip(cats).zip(&texts) {
        let cat = if cat == Category::Thing && s == e && persons.contains(text) {
            Category::Person
        } else {
            cat
        };
        found.push((t.byte_span(s, e), cat));
    }

    found.sort_by_key(|(r, _)| (r.start, r.end));
    found.dedup_by(|a, b| a.0 == b.0);
    found
        .into_iter()
        .map(|(r, category)| AnswerCandidate {
            span: AnswerSpan::new(&context[r.clone()], text::byte_to_char(context, r.start)),
            category,
        })
        .collect()
}

/// End token index of a date phrase starting at `i`, if any.
fn match_date(t: &Tokens, i: usize) -> Option<usize> {
    let w = t.text(i);
    let next_is = |k: usize, f: fn(&str) -> bool| k < t.toks.len() && f(t.text(k));
    if month_index(w).is_some() {
        // Month Day, Year | Month Day | Month Year | Month
        if t.joinable(i) && next_is(i + 1, is_day) {
            if t.joinable_comma(i + 1) && next_is(i + 2, is_year) {
                return Some(i + 2);
            }
            if t.joinable(i + 1) && next_is(i + 2, is_year) {
                return Some(i + 2);
            }
            return Some(i + 1);
        }
        if t.joinable(i) && next_is(i + 1, is_year) {
            return Some(i + 1);
        }
        // a bare month opening a sentence may be a verb ("May I ...")
        return (!t.initial[i]).then_some(i);
    }
    if is_day(w) && t.joinable(i) && i + 1 < t.toks.len() && month_index(t.text(i + 1)).is_some() {
        if t.joinable(i + 1) && next_is(i + 2, is_year) {
            return Some(i + 2);
        }
        return Some(i + 1);
    }
    is_year(w).then_some(i)
}

/// True when the text of tokens `s..=e` also appears at a token boundary
/// somewhere that is not the start of a sentence.
fn occurs_mid_sentence(t: &Tokens, s: usize, e: usize) -> bool {
    let want: Vec<&str> = (s..=e).map(|k| t.text(k)).collect();
    let len = want.len();
    (0..t.toks.len().saturating_sub(len - 1)).any(|k| {
        k != s
            && !t.initial[k]
            && (k..k + len).all(|j| t.text(j) == want[j - k])
            && (k..k + len - 1).all(|j| t.joinable(j))
    })
}

fn categorize(tokens: &[&str]) -> Category {
    let first = tokens[0];
    let last = tokens[tokens.len() - 1];
    let joined = tokens.join(" ");
    if ORG_SUFFIXES.contains(&last) {
        Category::Organization
    } else if PLACE_SUFFIXES.contains(&last) || PLACES.contains(&joined.as_str()) {
        Category::Place
    } else if tokens.len() >= 2 && PLACE_PREFIXES.contains(&first) {
        Category::Place
    } else if tokens.len() == 2 {
        Category::Person
    } else {
        Category::Thing
    }
}
