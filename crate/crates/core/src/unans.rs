//! Synthetic unanswerable questions.
//!
//! Answerable questions are generated for every paragraph of an article and
//! then each question is moved to a different paragraph of the same article,
//! picked uniformly among the others. The moved question keeps its topic but
//! loses its answer. In strict mode a moved question is dropped when its
//! original answer text appears verbatim in the new context.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cloze::{self, GenerationConfig};
use crate::error::{Error, Result};
use crate::eval::normalize_answer;
use crate::par;
use crate::seed;
use crate::squad::{AnswerSpan, Article, Dataset, QuestionAnswer, Version};

/// `(source paragraph, target paragraph)` per question, in source order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShuffleAssignment {
    pub mapping: Vec<(usize, usize)>,
}

/// Fraction of normalized question tokens that also occur in the context.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OverlapScore(f64);

impl OverlapScore {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Reassigns every question to a uniformly chosen paragraph other than its
/// own. `questions_per_paragraph[i]` is the number of questions generated
/// from paragraph `i`.
pub fn shuffle_within_article<R: Rng + ?Sized>(
    questions_per_paragraph: &[usize],
    rng: &mut R,
) -> Result<ShuffleAssignment> {
    let bearing = questions_per_paragraph.iter().filter(|&&n| n > 0).count();
    if bearing < 2 {
        return Err(Error::NotShufflable(format!(
            "{bearing} paragraph(s) with questions, at least 2 required"
        )));
    }
    let n = questions_per_paragraph.len();
    let mut mapping = Vec::with_capacity(questions_per_paragraph.iter().sum());
    for (src, &count) in questions_per_paragraph.iter().enumerate() {
        for _ in 0..count {
            let r = rng.random_range(0..n - 1);
            mapping.push((src, if r >= src { r + 1 } else { r }));
        }
    }
    Ok(ShuffleAssignment { mapping })
}

pub fn overlap_score(question: &str, context: &str) -> OverlapScore {
    let q = normalize_answer(question);
    if q.is_empty() {
        return OverlapScore(0.0);
    }
    let ctx: HashSet<String> = normalize_answer(context).into_iter().collect();
    let shared = q.iter().filter(|t| ctx.contains(*t)).count();
    OverlapScore(shared as f64 / q.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShuffledPair {
    pub id: String,
    pub question: String,
    pub source_paragraph: usize,
    pub target_paragraph: usize,
    /// Original answer, offset into the source paragraph's context.
    pub plausible_answer: AnswerSpan,
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnanswerableReport {
    pub article: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub skipped_reason: Option<String>,
    pub emitted: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mean_overlap: Option<f64>,
    pub dropped_strict: usize,
    pub pairs: Vec<ShuffledPair>,
}

impl UnanswerableReport {
    fn skipped(article: usize, reason: String) -> Self {
        Self { article, skipped_reason: Some(reason), emitted: 0, mean_overlap: None, dropped_strict: 0, pairs: vec![] }
    }
}

#[derive(Debug, Clone)]
pub struct UnanswerableArticle {
    /// `(target paragraph, question)` pairs.
    pub qas: Vec<(usize, QuestionAnswer)>,
    pub report: UnanswerableReport,
}

pub fn unanswerable_id(seed: u64, article: usize, n: usize) -> String {
    format!("syn-unans-{seed}-{article}-{n}")
}

pub fn generate_unanswerable<R: Rng + ?Sized>(
    article: &Article,
    article_index: usize,
    cfg: &GenerationConfig,
    strict: bool,
    rng: &mut R,
) -> Result<UnanswerableArticle> {
    let ans = cloze::generate_answerable(article, article_index, cfg, rng)?;
    let mut per_paragraph = vec![0usize; article.paragraphs.len()];
    for g in &ans.qas {
        per_paragraph[g.paragraph_index] += 1;
    }
    let assignment = match shuffle_within_article(&per_paragraph, rng) {
        Ok(a) => a,
        Err(Error::NotShufflable(reason)) => {
            return Ok(UnanswerableArticle { qas: vec![], report: UnanswerableReport::skipped(article_index, reason) })
        }
        Err(e) => return Err(e),
    };

    // generate_answerable emits in paragraph order, matching the mapping
    let mut qas = Vec::new();
    let mut pairs = Vec::new();
    let mut dropped = 0;
    for (g, &(src, target)) in ans.qas.iter().zip(&assignment.mapping) {
        debug_assert_eq!(g.paragraph_index, src);
        let original = &g.qa.answers[0];
        let target_ctx = &article.paragraphs[target].context;
        if strict && target_ctx.contains(original.text.as_str()) {
            dropped += 1;
            continue;
        }
        let id = unanswerable_id(cfg.rng_seed, article_index, qas.len());
        let overlap = overlap_score(&g.qa.question, target_ctx).value();
        pairs.push(ShuffledPair {
            id: id.clone(),
            question: g.qa.question.clone(),
            source_paragraph: src,
            target_paragraph: target,
            plausible_answer: original.clone(),
            overlap,
        });
        qas.push((target, QuestionAnswer::unanswerable(id, g.qa.question.clone())));
    }
    let mean_overlap = (!pairs.is_empty()).then(|| pairs.iter().map(|p| p.overlap).sum::<f64>() / pairs.len() as f64);
    let report = UnanswerableReport {
        article: article_index,
        skipped_reason: None,
        emitted: qas.len(),
        mean_overlap,
        dropped_strict: dropped,
        pairs,
    };
    Ok(UnanswerableArticle { qas, report })
}

#[derive(Debug, Clone)]
pub struct UnanswerableCorpus {
    pub dataset: Dataset,
    pub reports: Vec<UnanswerableReport>,
}

/// Runs [`generate_unanswerable`] over every article with per-article
/// generators, like [`cloze::generate_answerable_corpus`].
pub fn generate_unanswerable_corpus(
    articles: &[Article],
    cfg: &GenerationConfig,
    strict: bool,
    workers: usize,
) -> Result<UnanswerableCorpus> {
    cfg.check()?;
    let results = par::map_indexed(articles, workers, |ai, a| {
        let mut rng = seed::sub_rng(cfg.rng_seed, ai as u64);
        generate_unanswerable(a, ai, cfg, strict, &mut rng)
    })?;
    let mut out = UnanswerableCorpus { dataset: Dataset::empty(Version::V20), reports: Vec::new() };
    for (a, res) in articles.iter().zip(results) {
        let res = res?;
        out.reports.push(res.report);
        if let Some(article) = cloze::attach(a, res.qas) {
            out.dataset.articles.push(article);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Relevance {
    /// Mean overlap of moved questions with the paragraph they were moved to.
    pub within_article: f64,
    /// Mean overlap of the same questions with a random paragraph of a random
    /// other article.
    pub cross_article: f64,
    pub pairs: usize,
}

/// Compares within-article overlap against a cross-article baseline. Needs at
/// least two articles.
pub fn relevance<R: Rng + ?Sized>(articles: &[Article], reports: &[UnanswerableReport], rng: &mut R) -> Result<Relevance> {
    if articles.len() < 2 {
        return Err(Error::Range("relevance baseline needs at least two articles".into()));
    }
    let (mut within, mut cross, mut n) = (0.0, 0.0, 0usize);
    for r in reports {
        for p in &r.pairs {
            within += p.overlap;
            let mut other = rng.random_range(0..articles.len() - 1);
            if other >= r.article {
                other += 1;
            }
            let paras = &articles[other].paragraphs;
            let ctx = &paras[rng.random_range(0..paras.len())].context;
            cross += overlap_score(&p.question, ctx).value();
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::Range("no shuffled questions to compare".into()));
    }
    Ok(Relevance { within_article: within / n as f64, cross_article: cross / n as f64, pairs: n })
}
