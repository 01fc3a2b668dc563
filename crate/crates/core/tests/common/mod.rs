#![allow(dead_code)]

use qasynth_core::seed::rng_from_seed;
use qasynth_core::squad::{AnswerSpan, Article, Dataset, Paragraph, QuestionAnswer, Version};
use rand::seq::IndexedRandom;
use rand::Rng;

const FIRST: &[&str] = &[
    "Alice", "Bruno", "Clara", "Dmitri", "Elena", "Farid", "Greta", "Hugo", "Ines", "Jonas", "Kira", "Lars", "Mona",
    "Nils", "Olga", "Pavel",
];
const LAST: &[&str] = &[
    "Mercer", "Halden", "Ostrova", "Quill", "Rasmussen", "Sato", "Thorne", "Ulrich", "Varga", "Weir", "Yates",
    "Zeller",
];
const SYLLABLES: &[&str] = &["ka", "lor", "vem", "tis", "dra", "mon", "quel", "bri", "sar", "nut", "pel", "zo", "gan", "fir"];

fn pseudo_word<R: Rng>(rng: &mut R, syllables: usize) -> String {
    (0..syllables).map(|_| *SYLLABLES.choose(rng).unwrap()).collect()
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
}

/// Topical synthetic corpus: every article has its own vocabulary of
/// invented nouns and names that recur across its paragraphs.
pub fn synthetic_corpus(articles: usize, seed: u64) -> Vec<Article> {
    let mut rng = rng_from_seed(seed);
    (0..articles)
        .map(|ai| {
            let topics: Vec<String> = (0..6).map(|_| pseudo_word(&mut rng, 3)).collect();
            let people: Vec<String> = (0..3)
                .map(|_| format!("{} {}", FIRST.choose(&mut rng).unwrap(), LAST.choose(&mut rng).unwrap()))
                .collect();
            let place = format!("Port {}", capitalize(&pseudo_word(&mut rng, 2)));
            let org = format!("{} Guild", capitalize(&pseudo_word(&mut rng, 2)));
            let n_par = rng.random_range(2..=5);
            let paragraphs = (0..n_par)
                .map(|_| {
                    let mut sents = Vec::new();
                    for _ in 0..rng.random_range(3..=5) {
                        let t1 = topics.choose(&mut rng).unwrap();
                        let t2 = topics.choose(&mut rng).unwrap();
                        let p = people.choose(&mut rng).unwrap();
                        let year = rng.random_range(1800..2020);
                        let num = rng.random_range(2..500);
                        let s = match rng.random_range(0..5) {
                            0 => format!("In {year}, {p} founded the {t1} {t2} workshop at {place}."),
                            1 => format!("The {t1} of {place} was studied by {p} for {num} years."),
                            2 => format!("Later that decade {p} sold {num} {t1} barrels to the {org}."),
                            3 => format!("Critics said the {t1} trade around {place} declined after {year}."),
                            _ => format!("Following the {t2} season, {p} moved to {place} and joined the {org}."),
                        };
                        sents.push(s);
                    }
                    Paragraph::new(sents.join(" "))
                })
                .collect();
            Article { title: format!("Article {ai}"), paragraphs }
        })
        .collect()
}

pub fn corpus_text(articles: &[Article]) -> String {
    let mut s = String::new();
    for a in articles {
        s.push_str(&format!("= {} =\n\n", a.title));
        for p in &a.paragraphs {
            s.push_str(&p.context);
            s.push_str("\n\n");
        }
    }
    s
}

const WORDS: &[&str] = &[
    "river", "the", "Crown", "an", "año", "Zürich", "flow", "1996", "a", "Chuck", "Daly", "naïve", "co-op", "x", "—",
    "éclair", "data", "Nets",
];

/// Random well-formed 2.0 dataset with character-offset answers, unique ids
/// and a mix of answerable/unanswerable questions.
pub fn random_dataset<R: Rng>(rng: &mut R, max_questions: usize) -> Dataset {
    let mut next_id = 0usize;
    let mut budget = rng.random_range(0..=max_questions);
    let mut articles = Vec::new();
    for ai in 0..rng.random_range(1..=4) {
        let mut paragraphs = Vec::new();
        for _ in 0..rng.random_range(1..=3) {
            let len = rng.random_range(1..20);
            let words: Vec<&str> = (0..len).map(|_| *WORDS.choose(rng).unwrap()).collect();
            let context = words.join(" ");
            let chars: Vec<char> = context.chars().collect();
            let nq = if budget == 0 { 0 } else { rng.random_range(0..=budget.min(4)) };
            budget -= nq;
            let qas = (0..nq)
                .map(|_| {
                    let id = format!("id{next_id}");
                    next_id += 1;
                    if rng.random_bool(0.3) {
                        let mut q = QuestionAnswer::unanswerable(id, "why ?");
                        if rng.random_bool(0.5) {
                            q.plausible_answers = Some(vec![random_span(rng, &chars)]);
                        }
                        q
                    } else {
                        let n = rng.random_range(1..=3);
                        QuestionAnswer {
                            id,
                            question: "what ?".into(),
                            answers: (0..n).map(|_| random_span(rng, &chars)).collect(),
                            is_impossible: false,
                            plausible_answers: None,
                        }
                    }
                })
                .collect();
            paragraphs.push(Paragraph { context, qas });
        }
        articles.push(Article { title: format!("t{ai}"), paragraphs });
    }
    Dataset::new(Version::V20, articles)
}

fn random_span<R: Rng>(rng: &mut R, chars: &[char]) -> AnswerSpan {
    let start = rng.random_range(0..chars.len());
    let len = rng.random_range(1..=(chars.len() - start).min(12));
    AnswerSpan::new(chars[start..start + len].iter().collect::<String>(), start)
}

/// Naive substring check straight from the definition.
pub fn span_matches(context: &str, span: &AnswerSpan) -> bool {
    let ctx: Vec<char> = context.chars().collect();
    let want: Vec<char> = span.text.chars().collect();
    span.answer_start + want.len() <= ctx.len() && ctx[span.answer_start..span.answer_start + want.len()] == want[..]
}

// ---------------------------------------------------------------------------
// Brute-force scorer, written independently of the eval module.

fn naive_normalize(s: &str) -> Vec<String> {
    const PUNCT: &str = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";
    let mut cleaned = String::new();
    for ch in s.chars() {
        for lc in ch.to_lowercase() {
            if !PUNCT.contains(lc) {
                cleaned.push(lc);
            }
        }
    }
    let mut out = Vec::new();
    for w in cleaned.split_whitespace() {
        if w != "a" && w != "an" && w != "the" {
            out.push(w.to_string());
        }
    }
    out
}

fn naive_f1(pred: &[String], gold: &[String]) -> f64 {
    if pred.is_empty() && gold.is_empty() {
        return 1.0;
    }
    if pred.is_empty() || gold.is_empty() {
        return 0.0;
    }
    // count common tokens as sum over distinct tokens of min(count_pred, count_gold)
    let mut distinct: Vec<&String> = pred.iter().collect();
    distinct.sort();
    distinct.dedup();
    let mut common = 0usize;
    for t in distinct {
        let cp = pred.iter().filter(|x| *x == t).count();
        let cg = gold.iter().filter(|x| *x == t).count();
        common += cp.min(cg);
    }
    if common == 0 {
        return 0.0;
    }
    let p = common as f64 / pred.len() as f64;
    let r = common as f64 / gold.len() as f64;
    2.0 * p * r / (p + r)
}

/// `(em %, f1 %)` over all gold questions.
pub fn brute_force_scores(gold: &Dataset, preds: &std::collections::BTreeMap<String, String>) -> (f64, f64) {
    let mut em_sum = 0.0;
    let mut f1_sum = 0.0;
    let mut n = 0usize;
    for a in &gold.articles {
        for p in &a.paragraphs {
            for q in &p.qas {
                n += 1;
                let Some(pred) = preds.get(&q.id) else { continue };
                if q.is_impossible {
                    if pred.is_empty() {
                        em_sum += 1.0;
                        f1_sum += 1.0;
                    }
                    continue;
                }
                let pn = naive_normalize(pred);
                let mut best_em = 0.0f64;
                let mut best_f1 = 0.0f64;
                for g in &q.answers {
                    let gn = naive_normalize(&g.text);
                    if gn == pn {
                        best_em = 1.0;
                    }
                    best_f1 = best_f1.max(naive_f1(&pn, &gn));
                }
                em_sum += best_em;
                f1_sum += best_f1;
            }
        }
    }
    if n == 0 {
        return (0.0, 0.0);
    }
    (100.0 * em_sum / n as f64, 100.0 * f1_sum / n as f64)
}

/// Predictions that hit, partially hit, miss, or omit gold questions.
pub fn random_predictions<R: Rng>(rng: &mut R, gold: &Dataset) -> std::collections::BTreeMap<String, String> {
    let mut preds = std::collections::BTreeMap::new();
    for q in gold.questions() {
        let roll = rng.random_range(0..6);
        let text = match roll {
            0 => continue,
            1 => String::new(),
            2 if !q.answers.is_empty() => q.answers[rng.random_range(0..q.answers.len())].text.clone(),
            3 if !q.answers.is_empty() => {
                let t = &q.answers[0].text;
                t.split_whitespace().take(1).collect::<Vec<_>>().join(" ") + " The river"
            }
            _ => (0..rng.random_range(1..4)).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" "),
        };
        preds.insert(q.id.clone(), text);
    }
    if rng.random_bool(0.2) {
        preds.insert("not-in-gold".into(), "x".into());
    }
    preds
}
