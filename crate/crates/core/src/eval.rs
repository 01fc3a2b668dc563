//! Exact-match / F1 scoring of predictions against a gold dataset, and
//! augmentation gain analysis.
//!
//! Normalization follows the usual SQuAD convention: lowercase, strip ASCII
//! punctuation, drop the articles `a`, `an`, `the`, split on whitespace.
//! An empty prediction string means "no answer".

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::squad::{Dataset, QuestionAnswer};

/// Question id to predicted answer text.
pub type Predictions = BTreeMap<String, String>;

pub fn parse_predictions(bytes: &[u8]) -> Result<Predictions> {
    let v: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| Error::Json {
        offset: 0,
        message: e.to_string(),
    })?;
    let obj = v.as_object().ok_or_else(|| Error::schema("$", "predictions must be a JSON object"))?;
    obj.iter()
        .map(|(k, v)| match v {
            serde_json::Value::String(s) => Ok((k.clone(), s.clone())),
            _ => Err(Error::schema(format!("$.{k}"), "expected string")),
        })
        .collect()
}

pub fn normalize_answer(s: &str) -> Vec<String> {
    let lowered: String = s
        .to_lowercase()
        .chars()
        .filter(|c| !c.is_ascii_punctuation())
        .collect();
    lowered
        .split_whitespace()
        .filter(|t| !matches!(*t, "a" | "an" | "the"))
        .map(str::to_owned)
        .collect()
}

/// Harmonic mean of multiset precision and recall.
pub fn token_f1<S: AsRef<str>>(pred: &[S], gold: &[S]) -> f64 {
    if pred.is_empty() || gold.is_empty() {
        return if pred.is_empty() && gold.is_empty() { 1.0 } else { 0.0 };
    }
    let mut counts: HashMap<&str, isize> = HashMap::new();
    for t in gold {
        *counts.entry(t.as_ref()).or_default() += 1;
    }
    let mut common = 0usize;
    for t in pred {
        if let Some(c) = counts.get_mut(t.as_ref()) {
            if *c > 0 {
                *c -= 1;
                common += 1;
            }
        }
    }
    if common == 0 {
        return 0.0;
    }
    let precision = common as f64 / pred.len() as f64;
    let recall = common as f64 / gold.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

/// `(em, f1)` for one question.
pub fn score_question(gold: &QuestionAnswer, pred: &str) -> (u8, f64) {
    if gold.is_impossible || gold.answers.is_empty() {
        return if pred.is_empty() { (1, 1.0) } else { (0, 0.0) };
    }
    let p = normalize_answer(pred);
    let mut em = 0;
    let mut f1 = 0.0f64;
    for a in &gold.answers {
        let g = normalize_answer(&a.text);
        if g == p {
            em = 1;
        }
        f1 = f1.max(token_f1(&p, &g));
    }
    (em, f1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionScore {
    pub id: String,
    pub em: u8,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Subset {
    pub exact: f64,
    pub f1: f64,
    pub total: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub exact: f64,
    pub f1: f64,
    pub total: usize,
    pub answerable: Subset,
    pub unanswerable: Subset,
    pub missing: usize,
    pub extra: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub per_question: Vec<QuestionScore>,
}

impl EvalReport {
    /// Fixed-width summary with percentages to two decimals.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<14}{:>8}{:>9}{:>9}", "subset", "total", "EM (%)", "F1 (%)");
        for (name, sub) in [
            ("all", Subset { exact: self.exact, f1: self.f1, total: self.total }),
            ("answerable", self.answerable),
            ("unanswerable", self.unanswerable),
        ] {
            let _ = writeln!(s, "{:<14}{:>8}{:>9.2}{:>9.2}", name, sub.total, sub.exact, sub.f1);
        }
        let _ = writeln!(s, "missing predictions: {}, extra predictions: {}", self.missing, self.extra);
        s
    }
}

fn subset(scores: &[(bool, u8, f64)], pick: impl Fn(bool) -> bool) -> Subset {
    let (mut em, mut f1, mut n) = (0u64, 0.0f64, 0usize);
    for &(imp, e, f) in scores {
        if pick(imp) {
            em += e as u64;
            f1 += f;
            n += 1;
        }
    }
    if n == 0 {
        return Subset { exact: 0.0, f1: 0.0, total: 0 };
    }
    Subset { exact: 100.0 * em as f64 / n as f64, f1: 100.0 * f1 / n as f64, total: n }
}

/// Macro-averages per-question scores over every gold question. Gold ids
/// without a prediction score zero and are counted in `missing`; predicted
/// ids absent from gold are counted in `extra`.
pub fn evaluate(gold: &Dataset, preds: &Predictions) -> EvalReport {
    let qas: Vec<&QuestionAnswer> = gold.questions().collect();
    let scored: Vec<(bool, Option<(u8, f64)>)> = qas
        .par_iter()
        .map(|q| (q.is_impossible, preds.get(&q.id).map(|p| score_question(q, p))))
        .collect();

    let missing = scored.iter().filter(|(_, s)| s.is_none()).count();
    let gold_ids: HashSet<&str> = qas.iter().map(|q| q.id.as_str()).collect();
    let extra = preds.keys().filter(|k| !gold_ids.contains(k.as_str())).count();

    let flat: Vec<(bool, u8, f64)> = scored
        .iter()
        .map(|&(imp, s)| {
            let (e, f) = s.unwrap_or((0, 0.0));
            (imp, e, f)
        })
        .collect();
    let all = subset(&flat, |_| true);
    EvalReport {
        exact: all.exact,
        f1: all.f1,
        total: all.total,
        answerable: subset(&flat, |imp| !imp),
        unanswerable: subset(&flat, |imp| imp),
        missing,
        extra,
        per_question: qas
            .iter()
            .zip(&flat)
            .map(|(q, &(_, em, f1))| QuestionScore { id: q.id.clone(), em, f1 })
            .collect(),
    }
}

/// Score change from adding `added_examples` training examples, with per-1,000
/// normalization by plain division.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    pub delta_f1: f64,
    pub delta_em: f64,
    pub added_examples: usize,
    pub f1_gain_per_1k: f64,
    pub em_gain_per_1k: f64,
}

impl GainReport {
    pub fn from_scores(
        baseline_f1: f64,
        baseline_em: f64,
        augmented_f1: f64,
        augmented_em: f64,
        added_examples: usize,
    ) -> Result<Self> {
        if added_examples == 0 {
            return Err(Error::Range("added example count must be positive".into()));
        }
        let delta_f1 = augmented_f1 - baseline_f1;
        let delta_em = augmented_em - baseline_em;
        let per_1k = 1000.0 / added_examples as f64;
        Ok(Self {
            delta_f1,
            delta_em,
            added_examples,
            f1_gain_per_1k: delta_f1 * per_1k,
            em_gain_per_1k: delta_em * per_1k,
        })
    }
}

pub fn gain_per_example(baseline: &EvalReport, augmented: &EvalReport, added: usize) -> Result<GainReport> {
    GainReport::from_scores(baseline.f1, baseline.exact, augmented.f1, augmented.exact, added)
}
