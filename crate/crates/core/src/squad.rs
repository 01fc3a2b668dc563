//! SQuAD object graph: parsing, serialization, conversion, validation and
//! statistics.
//!
//! The reader is tolerant (unknown fields are ignored) and the writer is
//! canonical: `{"version", "data"}` at the top, then articles
//! `{"title", "paragraphs"}`, paragraphs `{"context", "qas"}` and questions
//! `{"id", "question", "answers", "is_impossible"}`. `is_impossible` and
//! `plausible_answers` are only written for version 2.0.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Version {
    #[serde(rename = "1.1")]
    V11,
    #[serde(rename = "2.0")]
    V20,
}

impl Version {
    pub fn as_str(self) -> &'static str {
        match self {
            Version::V11 => "1.1",
            Version::V20 => "2.0",
        }
    }
}

impl fmt::Display for Version {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Version {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().trim_start_matches(['v', 'V']) {
            "1.1" => Ok(Version::V11),
            "2.0" => Ok(Version::V20),
            other => Err(Error::Version(format!("unsupported version tag {other:?}"))),
        }
    }
}

/// An answer as a character offset into its paragraph's context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerSpan {
    pub text: String,
    pub answer_start: usize,
}

impl AnswerSpan {
    pub fn new(text: impl Into<String>, answer_start: usize) -> Self {
        Self { text: text.into(), answer_start }
    }

    /// True when `context` holds exactly `text` at `answer_start`.
    pub fn is_aligned(&self, context: &str) -> bool {
        text::char_slice(context, self.answer_start, self.text.chars().count())
            .is_some_and(|s| s == self.text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuestionAnswer {
    pub id: String,
    pub question: String,
    pub answers: Vec<AnswerSpan>,
    pub is_impossible: bool,
    pub plausible_answers: Option<Vec<AnswerSpan>>,
}

impl QuestionAnswer {
    pub fn answerable(id: impl Into<String>, question: impl Into<String>, answer: AnswerSpan) -> Self {
        Self {
            id: id.into(),
            question: question.into(),
            answers: vec![answer],
            is_impossible: false,
            plausible_answers: None,
        }
    }

    pub fn unanswerable(id: impl Into<String>, question: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            question: question.into(),
            answers: Vec::new(),
            is_impossible: true,
            plausible_answers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Paragraph {
    pub context: String,
    pub qas: Vec<QuestionAnswer>,
}

impl Paragraph {
    pub fn new(context: impl Into<String>) -> Self {
        Self { context: context.into(), qas: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Article {
    pub title: String,
    pub paragraphs: Vec<Paragraph>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub version: Version,
    pub articles: Vec<Article>,
}

impl Dataset {
    pub fn new(version: Version, articles: Vec<Article>) -> Self {
        Self { version, articles }
    }

    pub fn empty(version: Version) -> Self {
        Self::new(version, Vec::new())
    }

    pub fn questions(&self) -> impl Iterator<Item = &QuestionAnswer> {
        self.articles
            .iter()
            .flat_map(|a| a.paragraphs.iter())
            .flat_map(|p| p.qas.iter())
    }

    pub fn question_count(&self) -> usize {
        self.articles
            .iter()
            .flat_map(|a| a.paragraphs.iter())
            .map(|p| p.qas.len())
            .sum()
    }

    /// Drops paragraphs without questions and articles without paragraphs.
    pub fn prune_empty(&mut self) {
        for a in &mut self.articles {
            a.paragraphs.retain(|p| !p.qas.is_empty());
        }
        self.articles.retain(|a| !a.paragraphs.is_empty());
    }
}

// ---------------------------------------------------------------------------
// Parsing

pub fn parse_dataset(bytes: &[u8]) -> Result<Dataset> {
    let root: Value = serde_json::from_slice(bytes).map_err(|e| json_error(bytes, &e))?;
    let root = as_object(&root, "$")?;
    let version: Version = as_str(field(root, "$", "version")?, "$.version")?
        .parse()
        .map_err(|e: Error| Error::schema("$.version", e.to_string()))?;
    let data = as_array(field(root, "$", "data")?, "$.data")?;

    let mut seen = HashSet::new();
    let mut articles = Vec::with_capacity(data.len());
    for (ai, a) in data.iter().enumerate() {
        let path = format!("$.data[{ai}]");
        let obj = as_object(a, &path)?;
        let title = as_str(field(obj, &path, "title")?, &format!("{path}.title"))?.to_owned();
        let pars = as_array(field(obj, &path, "paragraphs")?, &format!("{path}.paragraphs"))?;
        let mut paragraphs = Vec::with_capacity(pars.len());
        for (pi, p) in pars.iter().enumerate() {
            let ppath = format!("{path}.paragraphs[{pi}]");
            paragraphs.push(parse_paragraph(p, &ppath, &mut seen)?);
        }
        articles.push(Article { title, paragraphs });
    }
    Ok(Dataset { version, articles })
}

fn parse_paragraph(v: &Value, path: &str, seen: &mut HashSet<String>) -> Result<Paragraph> {
    let obj = as_object(v, path)?;
    let context = as_str(field(obj, path, "context")?, &format!("{path}.context"))?.to_owned();
    let qas_v = as_array(field(obj, path, "qas")?, &format!("{path}.qas"))?;
    let mut qas = Vec::with_capacity(qas_v.len());
    for (qi, q) in qas_v.iter().enumerate() {
        let qpath = format!("{path}.qas[{qi}]");
        let qa = parse_qa(q, &qpath)?;
        if !seen.insert(qa.id.clone()) {
            return Err(Error::DuplicateId { id: qa.id, path: qpath });
        }
        qas.push(qa);
    }
    Ok(Paragraph { context, qas })
}

fn parse_qa(v: &Value, path: &str) -> Result<QuestionAnswer> {
    let obj = as_object(v, path)?;
    let id = match field(obj, path, "id")? {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(Error::schema(format!("{path}.id"), "expected string")),
    };
    let question = as_str(field(obj, path, "question")?, &format!("{path}.question"))?.to_owned();
    let answers = parse_spans(field(obj, path, "answers")?, &format!("{path}.answers"))?;
    let is_impossible = match obj.get("is_impossible") {
        None | Some(Value::Null) => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => return Err(Error::schema(format!("{path}.is_impossible"), "expected boolean")),
    };
    let plausible_answers = match obj.get("plausible_answers") {
        None | Some(Value::Null) => None,
        Some(v) => Some(parse_spans(v, &format!("{path}.plausible_answers"))?),
    };
    Ok(QuestionAnswer { id, question, answers, is_impossible, plausible_answers })
}

fn parse_spans(v: &Value, path: &str) -> Result<Vec<AnswerSpan>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let apath = format!("{path}[{i}]");
            let obj = as_object(a, &apath)?;
            let text = as_str(field(obj, &apath, "text")?, &format!("{apath}.text"))?.to_owned();
            let answer_start = field(obj, &apath, "answer_start")?
                .as_u64()
                .ok_or_else(|| Error::schema(format!("{apath}.answer_start"), "expected non-negative integer"))?
                as usize;
            Ok(AnswerSpan { text, answer_start })
        })
        .collect()
}

fn field<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::schema(format!("{path}.{key}"), "missing required field"))
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::schema(path, "expected object"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::schema(path, "expected array"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| Error::schema(path, "expected string"))
}

fn json_error(bytes: &[u8], e: &serde_json::Error) -> Error {
    let line_start: usize = bytes
        .split_inclusive(|&b| b == b'\n')
        .take(e.line().saturating_sub(1))
        .map(<[u8]>::len)
        .sum();
    let offset = (line_start + e.column().saturating_sub(1)).min(bytes.len());
    Error::Json { offset, message: e.to_string() }
}

// ---------------------------------------------------------------------------
// Serialization

#[derive(Serialize)]
struct WireDataset<'a> {
    version: &'static str,
    data: Vec<WireArticle<'a>>,
}

#[derive(Serialize)]
struct WireArticle<'a> {
    title: &'a str,
    paragraphs: Vec<WireParagraph<'a>>,
}

#[derive(Serialize)]
struct WireParagraph<'a> {
    context: &'a str,
    qas: Vec<WireQa<'a>>,
}

#[derive(Serialize)]
struct WireQa<'a> {
    id: &'a str,
    question: &'a str,
    answers: &'a [AnswerSpan],
    #[serde(skip_serializing_if = "Option::is_none")]
    is_impossible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plausible_answers: Option<&'a [AnswerSpan]>,
}

/// Serializes `d` tagged as `version`. Writing 1.1 fails if any question is
/// unanswerable.
pub fn serialize_dataset(d: &Dataset, version: Version) -> Result<Vec<u8>> {
    if version == Version::V11 {
        let ids: Vec<String> = d.questions().filter(|q| q.is_impossible).map(|q| q.id.clone()).collect();
        if !ids.is_empty() {
            return Err(Error::Conversion { ids });
        }
    }
    let v2 = version == Version::V20;
    let wire = WireDataset {
        version: version.as_str(),
        data: d
            .articles
            .iter()
            .map(|a| WireArticle {
                title: &a.title,
                paragraphs: a
                    .paragraphs
                    .iter()
                    .map(|p| WireParagraph {
                        context: &p.context,
                        qas: p
                            .qas
                            .iter()
                            .map(|q| WireQa {
                                id: &q.id,
                                question: &q.question,
                                answers: &q.answers,
                                is_impossible: v2.then_some(q.is_impossible),
                                plausible_answers: if v2 { q.plausible_answers.as_deref() } else { None },
                            })
                            .collect(),
                    })
                    .collect(),
            })
            .collect(),
    };
    Ok(serde_json::to_vec(&wire).expect("in-memory serialization cannot fail"))
}

// ---------------------------------------------------------------------------
// Conversion

#[derive(Debug, Clone)]
pub struct Converted {
    pub dataset: Dataset,
    /// Set when the input needed no conversion.
    pub warning: Option<String>,
}

/// Retags a 1.1 dataset as 2.0. Every question keeps its answers and is
/// written with an explicit `is_impossible: false`.
pub fn convert_v11_to_v20(mut d: Dataset) -> Converted {
    if d.version == Version::V20 {
        return Converted { dataset: d, warning: Some("input is already SQuAD 2.0; nothing to convert".into()) };
    }
    d.version = Version::V20;
    for a in &mut d.articles {
        for p in &mut a.paragraphs {
            for q in &mut p.qas {
                q.is_impossible = false;
            }
        }
    }
    Converted { dataset: d, warning: None }
}

// ---------------------------------------------------------------------------
// Validation

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    EmptyTitle,
    EmptyArticle,
    EmptyContext,
    DuplicateId,
    SpanMisaligned,
    ImpossibleWithAnswers,
    AnswerableWithoutAnswers,
    ImpossibleInV11,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub path: String,
    pub kind: ViolationKind,
    pub detail: String,
}

/// Lists every invariant breach in `d`. An empty result means the dataset is
/// well-formed.
pub fn validate(d: &Dataset) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |path: String, kind, detail: String| out.push(Violation { path, kind, detail });
    let mut seen = HashSet::new();
    for (ai, a) in d.articles.iter().enumerate() {
        let apath = format!("$.data[{ai}]");
        if a.title.trim().is_empty() {
            push(format!("{apath}.title"), ViolationKind::EmptyTitle, "article title is empty".into());
        }
        if a.paragraphs.is_empty() {
            push(format!("{apath}.paragraphs"), ViolationKind::EmptyArticle, "article has no paragraphs".into());
        }
        for (pi, p) in a.paragraphs.iter().enumerate() {
            let ppath = format!("{apath}.paragraphs[{pi}]");
            if p.context.is_empty() {
                push(format!("{ppath}.context"), ViolationKind::EmptyContext, "context is empty".into());
            }
            for (qi, q) in p.qas.iter().enumerate() {
                let qpath = format!("{ppath}.qas[{qi}]");
                if !seen.insert(q.id.as_str()) {
                    push(format!("{qpath}.id"), ViolationKind::DuplicateId, format!("id {:?} already used", q.id));
                }
                if q.is_impossible && !q.answers.is_empty() {
                    push(
                        format!("{qpath}.answers"),
                        ViolationKind::ImpossibleWithAnswers,
                        format!("{} answers on an unanswerable question", q.answers.len()),
                    );
                }
                if !q.is_impossible && q.answers.is_empty() {
                    push(
                        format!("{qpath}.answers"),
                        ViolationKind::AnswerableWithoutAnswers,
                        "answerable question has no answers".into(),
                    );
                }
                if q.is_impossible && d.version == Version::V11 {
                    push(
                        format!("{qpath}.is_impossible"),
                        ViolationKind::ImpossibleInV11,
                        "unanswerable question in a 1.1 dataset".into(),
                    );
                }
                let spans = q.answers.iter().map(|s| ("answers", s));
                let plausible = q.plausible_answers.iter().flatten().map(|s| ("plausible_answers", s));
                let mut idx = (0, 0);
                for (key, span) in spans.chain(plausible) {
                    let i = if key == "answers" { &mut idx.0 } else { &mut idx.1 };
                    if !span.is_aligned(&p.context) {
                        let found = text::char_slice(&p.context, span.answer_start, span.text.chars().count());
                        push(
                            format!("{qpath}.{key}[{i}]"),
                            ViolationKind::SpanMisaligned,
                            format!(
                                "expected {:?} at {}, context has {:?}",
                                span.text,
                                span.answer_start,
                                found.unwrap_or("<out of bounds>")
                            ),
                        );
                    }
                    *i += 1;
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Statistics

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub article_count: usize,
    pub paragraph_count: usize,
    pub question_count: usize,
    pub answerable_count: usize,
    pub unanswerable_count: usize,
    pub unanswerable_ratio: f64,
}

pub fn compute_stats(d: &Dataset) -> DatasetStats {
    let mut s = DatasetStats {
        article_count: d.articles.len(),
        paragraph_count: 0,
        question_count: 0,
        answerable_count: 0,
        unanswerable_count: 0,
        unanswerable_ratio: 0.0,
    };
    for a in &d.articles {
        s.paragraph_count += a.paragraphs.len();
        for q in a.paragraphs.iter().flat_map(|p| &p.qas) {
            s.question_count += 1;
            if q.is_impossible {
                s.unanswerable_count += 1;
            } else {
                s.answerable_count += 1;
            }
        }
    }
    if s.question_count > 0 {
        s.unanswerable_ratio = s.unanswerable_count as f64 / s.question_count as f64;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const PISTONS_CONTEXT: &str = "As the \"Bad Boys\" era was fading, they were eliminated in five games in the first round of the playoffs by the New York Knicks. The Pistons would not return to the playoffs until 1996. Following the season, Chuck Daly left to coach the New Jersey Nets, and John Salley was traded to the Miami Heat. Meanwhile, the Bulls-Pistons rivalry took another ugly turn as Thomas was left off the Dream Team coached by Daly, reportedly at the request of Michael Jordan.";

    fn pistons_doc(version: &str, with_flag: bool) -> String {
        let start = PISTONS_CONTEXT.find("Chuck Daly").unwrap();
        let flag = if with_flag { r#", "is_impossible": false"# } else { "" };
        format!(
            r#"{{"version": "{version}", "data": [{{"title": "Detroit_Pistons", "paragraphs": [{{"context": {ctx}, "qas": [{{"id": "q1", "question": "Who left to coach the New Jersey Nets ?", "answers": [{{"text": "Chuck Daly", "answer_start": {start}}}]{flag}}}]}}]}}]}}"#,
            ctx = serde_json::to_string(PISTONS_CONTEXT).unwrap()
        )
    }

    #[test]
    fn parses_pistons_document() {
        let d = parse_dataset(pistons_doc("2.0", true).as_bytes()).unwrap();
        let s = compute_stats(&d);
        assert_eq!(s.question_count, 1);
        assert_eq!(s.answerable_count, 1);
        assert!(validate(&d).is_empty());
    }

    #[test]
    fn empty_data_array() {
        let d = parse_dataset(br#"{"version":"2.0","data":[]}"#).unwrap();
        assert!(d.articles.is_empty());
        let out = serialize_dataset(&d, Version::V20).unwrap();
        assert_eq!(out, br#"{"version":"2.0","data":[]}"#);
    }

    #[test]
    fn unknown_fields_are_ignored_and_not_written() {
        let doc = br#"{"version":"2.0","extra":1,"data":[{"title":"t","x":[],"paragraphs":[{"context":"abc","qas":[{"id":"1","question":"q","answers":[{"text":"b","answer_start":1,"foo":2}],"is_impossible":false}]}]}]}"#;
        let d = parse_dataset(doc).unwrap();
        let out = String::from_utf8(serialize_dataset(&d, Version::V20).unwrap()).unwrap();
        assert!(!out.contains("extra") && !out.contains("foo"));
    }

    #[test]
    fn malformed_json_reports_offset() {
        let doc = b"{\"version\": \"2.0\",\n \"data\": [}";
        match parse_dataset(doc) {
            Err(Error::Json { offset, .. }) => assert_eq!(doc[offset], b'}'),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_field_names_path() {
        let doc = br#"{"version":"2.0","data":[{"title":"t","paragraphs":[{"context":"c","qas":[{"id":"1","answers":[]}]}]}]}"#;
        match parse_dataset(doc) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "$.data[0].paragraphs[0].qas[0].question"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_id_is_integrity_error() {
        let doc = br#"{"version":"2.0","data":[{"title":"t","paragraphs":[{"context":"c","qas":[{"id":"1","question":"q","answers":[],"is_impossible":true},{"id":"1","question":"q","answers":[],"is_impossible":true}]}]}]}"#;
        assert!(matches!(parse_dataset(doc), Err(Error::DuplicateId { .. })));
    }

    #[test]
    fn fiscal_serializes_as_unanswerable() {
        let ctx = "A fiscal deficit is often funded by issuing bonds, such as Treasury bills or consols and gilt-edged securities.";
        let q = "Who can argue that fiscal policy can still be effective , especially in a liquidity trap where , they argue , crowding out is minimal ?";
        let d = Dataset::new(
            Version::V20,
            vec![Article {
                title: "Fiscal_policy".into(),
                paragraphs: vec![Paragraph { context: ctx.into(), qas: vec![QuestionAnswer::unanswerable("u1", q)] }],
            }],
        );
        let out = String::from_utf8(serialize_dataset(&d, Version::V20).unwrap()).unwrap();
        assert!(out.contains(r#""answers":[],"is_impossible":true"#), "{out}");
        assert!(matches!(serialize_dataset(&d, Version::V11), Err(Error::Conversion { ids }) if ids == ["u1"]));
    }

    #[test]
    fn v11_conversion_injects_flag() {
        let d = parse_dataset(pistons_doc("1.1", false).as_bytes()).unwrap();
        assert_eq!(d.version, Version::V11);
        let before = compute_stats(&d);
        let conv = convert_v11_to_v20(d.clone());
        assert!(conv.warning.is_none());
        let after = compute_stats(&conv.dataset);
        assert_eq!(before.question_count, after.question_count);
        assert_eq!(after.unanswerable_count, 0);
        let out = String::from_utf8(serialize_dataset(&conv.dataset, Version::V20).unwrap()).unwrap();
        assert!(out.starts_with(r#"{"version":"2.0""#));
        assert!(out.contains(r#""is_impossible":false"#));
        assert_eq!(conv.dataset.articles, d.articles);

        let again = convert_v11_to_v20(conv.dataset);
        assert!(again.warning.is_some());
    }

    #[test]
    fn validate_catches_offset_and_duplicates() {
        let mut d = parse_dataset(pistons_doc("2.0", true).as_bytes()).unwrap();
        d.articles[0].paragraphs[0].qas[0].answers[0].answer_start += 1;
        let v = validate(&d);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::SpanMisaligned);
        assert_eq!(v[0].path, "$.data[0].paragraphs[0].qas[0].answers[0]");

        let mut d = parse_dataset(pistons_doc("2.0", true).as_bytes()).unwrap();
        let dup = d.articles[0].paragraphs[0].qas[0].clone();
        d.articles[0].paragraphs[0].qas.push(dup);
        let v = validate(&d);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::DuplicateId);
    }

    #[test]
    fn validate_flags_answer_flag_mismatches() {
        let mut qa = QuestionAnswer::unanswerable("x", "q");
        qa.answers.push(AnswerSpan::new("a", 0));
        let mut qb = QuestionAnswer::unanswerable("y", "q");
        qb.is_impossible = false;
        let d = Dataset::new(
            Version::V11,
            vec![Article { title: "t".into(), paragraphs: vec![Paragraph { context: "a".into(), qas: vec![qa, qb] }] }],
        );
        let kinds: Vec<_> = validate(&d).into_iter().map(|v| v.kind).collect();
        assert_eq!(
            kinds,
            [ViolationKind::ImpossibleWithAnswers, ViolationKind::ImpossibleInV11, ViolationKind::AnswerableWithoutAnswers]
        );
    }

    #[test]
    fn stats_ratio() {
        let mk = |id: &str, imp: bool| {
            if imp {
                QuestionAnswer::unanswerable(id, "q")
            } else {
                QuestionAnswer::answerable(id, "q", AnswerSpan::new("c", 0))
            }
        };
        let d = Dataset::new(
            Version::V20,
            vec![Article {
                title: "t".into(),
                paragraphs: vec![Paragraph { context: "c".into(), qas: vec![mk("a", false), mk("b", false), mk("c", true)] }],
            }],
        );
        let s = compute_stats(&d);
        assert_eq!((s.question_count, s.answerable_count, s.unanswerable_count), (3, 2, 1));
        assert!((s.unanswerable_ratio - 1.0 / 3.0).abs() < 1e-15);
        let e = compute_stats(&Dataset::empty(Version::V20));
        assert_eq!(e.question_count, 0);
        assert_eq!(e.unanswerable_ratio, 0.0);
    }
}
