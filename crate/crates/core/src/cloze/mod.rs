//! Synthetic answerable questions: candidate answers are pulled out of a
//! paragraph, one is sampled, the clause around it becomes a cloze
//! statement, and the cloze is rewritten as a question.

mod candidates;
mod translate;

pub use candidates::{extract_candidates, AnswerCandidate, Category};
pub use translate::{mask_position, wh_phrase, ClozeTranslator, MaskPosition, RuleTranslator, TranslatorKind};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::seed;
use crate::squad::{Article, Dataset, Paragraph, QuestionAnswer, Version};
use crate::text;

pub const MASK_TOKEN: &str = "[MASK]";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub max_questions_per_paragraph: usize,
    pub mask_token: String,
    pub rng_seed: u64,
    pub translator: TranslatorKind,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        Self {
            max_questions_per_paragraph: 5,
            mask_token: MASK_TOKEN.to_owned(),
            rng_seed: crate::DEFAULT_SEED,
            translator: TranslatorKind::Rule,
        }
    }
}

impl GenerationConfig {
    pub fn check(&self) -> Result<()> {
        if self.max_questions_per_paragraph == 0 {
            return Err(Error::Range("max_questions_per_paragraph must be at least 1".into()));
        }
        if self.mask_token.is_empty() {
            return Err(Error::Range("mask token must not be empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClozeInstance {
    pub article_index: usize,
    pub paragraph_index: usize,
    pub cloze_text: String,
    pub answer: AnswerCandidate,
    pub source_subclause: String,
}

pub fn sample_candidate<R: Rng + ?Sized>(candidates: &[AnswerCandidate], rng: &mut R) -> Result<AnswerCandidate> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    Ok(candidates[rng.random_range(0..candidates.len())].clone())
}

/// The clause around `candidate`: its sentence, narrowed to the
/// comma/semicolon-delimited piece holding the candidate when that piece has
/// at least five tokens.
pub fn extract_subclause(context: &str, candidate: &AnswerCandidate) -> String {
    let start = text::char_to_byte(context, candidate.span.answer_start).unwrap_or(context.len());
    let end = (start + candidate.span.text.len()).min(context.len());
    let Some(sentence) = text::sentences(context)
        .into_iter()
        .find(|r| r.start <= start && end <= r.end)
    else {
        return context.trim().to_owned();
    };

    let s = &context[sentence.clone()];
    let (rel_start, rel_end) = (start - sentence.start, end - sentence.start);
    let mut clause_start = 0;
    for (i, c) in s.char_indices().chain(std::iter::once((s.len(), ','))) {
        if c == ',' || c == ';' {
            if clause_start <= rel_start && rel_end <= i {
                let clause = s[clause_start..i].trim();
                if clause.split_whitespace().count() >= 5 {
                    return clause.to_owned();
                }
                break;
            }
            clause_start = i + c.len_utf8();
        }
    }
    s.to_owned()
}

/// Masks the first occurrence of the candidate text in `subclause`.
pub fn make_cloze(subclause: &str, candidate: &AnswerCandidate, cfg: &GenerationConfig) -> Result<ClozeInstance> {
    if !subclause.contains(candidate.span.text.as_str()) {
        return Err(Error::Consistency { candidate: candidate.span.text.clone(), text: subclause.to_owned() });
    }
    Ok(ClozeInstance {
        article_index: 0,
        paragraph_index: 0,
        cloze_text: subclause.replacen(candidate.span.text.as_str(), &cfg.mask_token, 1),
        answer: candidate.clone(),
        source_subclause: subclause.to_owned(),
    })
}

pub fn translate_cloze(cloze: &ClozeInstance, cfg: &GenerationConfig) -> String {
    cfg.translator.build().translate(cloze, &cfg.mask_token)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerableReport {
    pub article: usize,
    pub paragraphs_skipped: usize,
    pub qas_emitted: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedQa {
    pub paragraph_index: usize,
    pub qa: QuestionAnswer,
    pub cloze: ClozeInstance,
}

#[derive(Debug, Clone)]
pub struct AnswerableArticle {
    pub qas: Vec<GeneratedQa>,
    pub report: AnswerableReport,
}

pub fn answerable_id(seed: u64, article: usize, paragraph: usize, n: usize) -> String {
    format!("syn-ans-{seed}-{article}-{paragraph}-{n}")
}

/// Generates up to `max_questions_per_paragraph` questions per paragraph,
/// each on a distinct sampled candidate. Paragraphs without candidates are
/// skipped and counted in the report.
pub fn generate_answerable<R: Rng + ?Sized>(
    article: &Article,
    article_index: usize,
    cfg: &GenerationConfig,
    rng: &mut R,
) -> Result<AnswerableArticle> {
    cfg.check()?;
    let translator = cfg.translator.build();
    let mut qas = Vec::new();
    let mut skipped = 0;
    for (pi, p) in article.paragraphs.iter().enumerate() {
        let mut pool = extract_candidates(&p.context);
        if pool.is_empty() {
            skipped += 1;
            continue;
        }
        let take = cfg.max_questions_per_paragraph.min(pool.len());
        for n in 0..take {
            let cand = pool.remove(rng.random_range(0..pool.len()));
            let clause = extract_subclause(&p.context, &cand);
            let mut cloze = make_cloze(&clause, &cand, cfg)?;
            cloze.article_index = article_index;
            cloze.paragraph_index = pi;
            let question = translator.translate(&cloze, &cfg.mask_token);
            let qa = QuestionAnswer::answerable(
                answerable_id(cfg.rng_seed, article_index, pi, n),
                question,
                cand.span.clone(),
            );
            qas.push(GeneratedQa { paragraph_index: pi, qa, cloze });
        }
    }
    let report = AnswerableReport { article: article_index, paragraphs_skipped: skipped, qas_emitted: qas.len() };
    Ok(AnswerableArticle { qas, report })
}

/// Attaches generated questions to a copy of `article`, dropping paragraphs
/// that received none. Returns `None` when nothing is left.
pub(crate) fn attach(article: &Article, qas: impl IntoIterator<Item = (usize, QuestionAnswer)>) -> Option<Article> {
    let mut paragraphs: Vec<Paragraph> = article.paragraphs.iter().map(|p| Paragraph::new(p.context.clone())).collect();
    for (pi, qa) in qas {
        paragraphs[pi].qas.push(qa);
    }
    paragraphs.retain(|p| !p.qas.is_empty());
    (!paragraphs.is_empty()).then(|| Article { title: article.title.clone(), paragraphs })
}

#[derive(Debug, Clone)]
pub struct AnswerableCorpus {
    pub dataset: Dataset,
    pub reports: Vec<AnswerableReport>,
    pub clozes: Vec<ClozeInstance>,
}

/// Runs [`generate_answerable`] over every article. Each article draws from
/// its own generator seeded by `(rng_seed, article index)`, so the output
/// does not depend on `workers` (0 means the default thread count).
pub fn generate_answerable_corpus(articles: &[Article], cfg: &GenerationConfig, workers: usize) -> Result<AnswerableCorpus> {
    cfg.check()?;
    let results = par::map_indexed(articles, workers, |ai, a| {
        let mut rng = seed::sub_rng(cfg.rng_seed, ai as u64);
        generate_answerable(a, ai, cfg, &mut rng)
    })?;
    let mut out = AnswerableCorpus { dataset: Dataset::empty(Version::V20), reports: Vec::new(), clozes: Vec::new() };
    for (a, res) in articles.iter().zip(results) {
        let res = res?;
        out.reports.push(res.report);
        let mut pairs = Vec::with_capacity(res.qas.len());
        for g in res.qas {
            out.clozes.push(g.cloze);
            pairs.push((g.paragraph_index, g.qa));
        }
        if let Some(article) = attach(a, pairs) {
            out.dataset.articles.push(article);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use crate::squad::{validate, AnswerSpan};

    const PISTONS: &str = include_str!("../../fixtures/pistons_context.txt");

    fn cand(ctx: &str, text: &str, category: Category) -> AnswerCandidate {
        let b = ctx.find(text).unwrap();
        AnswerCandidate { span: AnswerSpan::new(text, crate::text::byte_to_char(ctx, b)), category }
    }

    fn cloze(text: &str, answer: &str, category: Category) -> ClozeInstance {
        ClozeInstance {
            article_index: 0,
            paragraph_index: 0,
            cloze_text: text.into(),
            answer: AnswerCandidate { span: AnswerSpan::new(answer, 0), category },
            source_subclause: text.replacen(MASK_TOKEN, answer, 1),
        }
    }

    #[test]
    fn pistons_subclause_cloze_question() {
        let ctx = PISTONS.trim();
        let c = cand(ctx, "Chuck Daly", Category::Person);
        let clause = extract_subclause(ctx, &c);
        assert_eq!(clause, "Chuck Daly left to coach the New Jersey Nets");
        let cz = make_cloze(&clause, &c, &GenerationConfig::default()).unwrap();
        assert_eq!(cz.cloze_text, "[MASK] left to coach the New Jersey Nets");
        assert_eq!(translate_cloze(&cz, &GenerationConfig::default()), "Who left to coach the New Jersey Nets ?");
    }

    #[test]
    fn subclause_rules() {
        let one = "Alice Smith founded the Harbor Guild in 1911.";
        assert_eq!(extract_subclause(one, &cand(one, "1911", Category::Date)), one);
        // candidate clause "in Oslo" has fewer than five tokens
        let s = "Later that year, in Oslo, the two rivals finally signed the long awaited treaty.";
        assert_eq!(extract_subclause(s, &cand(s, "Oslo", Category::Place)), s);
        // never spans sentences
        let two = "Bob Hale won. Then Carl Weir lost the final game badly.";
        assert_eq!(extract_subclause(two, &cand(two, "Carl Weir", Category::Person)), "Then Carl Weir lost the final game badly.");
    }

    #[test]
    fn cloze_masking() {
        let cfg = GenerationConfig::default();
        let c = AnswerCandidate { span: AnswerSpan::new("McDonald's", 9), category: Category::Organization };
        assert_eq!(make_cloze("I ate at McDonald's", &c, &cfg).unwrap().cloze_text, "I ate at [MASK]");
        assert_eq!(make_cloze("McDonald's", &c, &cfg).unwrap().cloze_text, "[MASK]");
        let x = AnswerCandidate { span: AnswerSpan::new("Ray", 0), category: Category::Person };
        let cz = make_cloze("Ray met Ray", &x, &cfg).unwrap();
        assert_eq!(cz.cloze_text, "[MASK] met Ray");
        assert_eq!(cz.cloze_text.replacen(MASK_TOKEN, "Ray", 1), cz.source_subclause);
        assert!(matches!(make_cloze("nobody here", &x, &cfg), Err(Error::Consistency { .. })));
    }

    #[test]
    fn translation_templates() {
        let t = RuleTranslator;
        assert_eq!(t.translate(&cloze("[MASK]", "x", Category::Thing), MASK_TOKEN), "What ?");
        assert_eq!(
            t.translate(&cloze("The Pistons returned in [MASK]", "1996", Category::Date), MASK_TOKEN),
            "When did the Pistons returned in ?"
        );
        assert_eq!(
            t.translate(&cloze("they sold [MASK] tickets.", "300", Category::Number), MASK_TOKEN),
            "How many did they sold tickets ?"
        );
        assert_eq!(
            t.translate(&cloze("[MASK] is the capital", "Oslo", Category::Place), MASK_TOKEN),
            "What place is the capital ?"
        );
        assert_eq!(mask_position("a [MASK].", MASK_TOKEN), MaskPosition::Suffix);
    }

    #[test]
    fn sampling_contract() {
        let one = vec![cand("Zed", "Zed", Category::Thing)];
        for s in 0..20 {
            assert_eq!(sample_candidate(&one, &mut rng_from_seed(s)).unwrap(), one[0]);
        }
        assert!(matches!(sample_candidate(&[], &mut rng_from_seed(1)), Err(Error::NoCandidates)));
        let many = extract_candidates(PISTONS.trim());
        let a = sample_candidate(&many, &mut rng_from_seed(42)).unwrap();
        let b = sample_candidate(&many, &mut rng_from_seed(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generate_pistons_paragraph() {
        let article = Article { title: "Pistons".into(), paragraphs: vec![Paragraph::new(PISTONS.trim())] };
        let cfg = GenerationConfig { max_questions_per_paragraph: 1, ..Default::default() };
        let out = generate_answerable(&article, 0, &cfg, &mut rng_from_seed(7)).unwrap();
        assert_eq!(out.qas.len(), 1);
        let g = &out.qas[0];
        assert_eq!(g.qa.id, "syn-ans-20200-0-0-0");
        assert!(extract_candidates(PISTONS.trim()).iter().any(|c| c.span == g.qa.answers[0]));
        let ds = Dataset::new(Version::V20, vec![attach(&article, [(0, g.qa.clone())]).unwrap()]);
        assert!(validate(&ds).is_empty());

        let again = generate_answerable(&article, 0, &cfg, &mut rng_from_seed(7)).unwrap();
        assert_eq!(again.qas, out.qas);
    }

    #[test]
    fn lowercase_article_yields_nothing() {
        let article = Article {
            title: "t".into(),
            paragraphs: vec![Paragraph::new("all quiet here."), Paragraph::new("nothing to see.")],
        };
        let out = generate_answerable(&article, 3, &GenerationConfig::default(), &mut rng_from_seed(1)).unwrap();
        assert!(out.qas.is_empty());
        assert_eq!(out.report, AnswerableReport { article: 3, paragraphs_skipped: 2, qas_emitted: 0 });
    }
}
