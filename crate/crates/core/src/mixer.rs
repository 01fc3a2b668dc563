//! Seeded sampling, merging and experiment assembly.
//!
//! Sampling works on questions, not paragraphs: a sample of `k` keeps exactly
//! `k` questions and prunes paragraphs and articles left empty. Every source
//! in a manifest gets its own generator derived from the manifest seed and the
//! source position, and the held-out split uses a separate stream.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;
use crate::squad::{self, compute_stats, Article, Dataset, Paragraph, Version};

/// A sample size, absolute or relative to the population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Take {
    Count(usize),
    Fraction(f64),
}

impl Take {
    /// Number of questions to keep out of `population`. Fractions round down.
    pub fn resolve(self, population: usize) -> Result<usize> {
        let k = match self {
            Take::Count(0) => return Err(Error::Range("take count must be positive".into())),
            Take::Count(k) => k,
            Take::Fraction(f) if !(f > 0.0 && f <= 1.0) => {
                return Err(Error::Range(format!("take fraction {f} outside (0, 1]")))
            }
            Take::Fraction(f) => (f * population as f64).floor() as usize,
        };
        if k == 0 {
            return Err(Error::Range(format!("{self:?} of {population} questions selects nothing")));
        }
        if k > population {
            return Err(Error::Range(format!("cannot take {k} of {population} questions")));
        }
        Ok(k)
    }
}

/// Keeps the questions whose flat index is marked in `keep`, preserving
/// document order.
fn filter_questions(d: &Dataset, keep: &[bool]) -> Dataset {
    let mut flat = 0;
    let mut articles = Vec::new();
    for a in &d.articles {
        let mut paragraphs = Vec::new();
        for p in &a.paragraphs {
            let qas: Vec<_> = p
                .qas
                .iter()
                .filter(|_| {
                    let k = keep[flat];
                    flat += 1;
                    k
                })
                .cloned()
                .collect();
            if !qas.is_empty() {
                paragraphs.push(Paragraph { context: p.context.clone(), qas });
            }
        }
        if !paragraphs.is_empty() {
            articles.push(Article { title: a.title.clone(), paragraphs });
        }
    }
    Dataset { version: d.version, articles }
}

fn pick<R: Rng + ?Sized>(population: usize, k: usize, rng: &mut R) -> Vec<bool> {
    let mut keep = vec![false; population];
    for i in index::sample(rng, population, k) {
        keep[i] = true;
    }
    keep
}

/// Uniform sample without replacement at the question level.
pub fn sample_dataset<R: Rng + ?Sized>(d: &Dataset, take: Take, rng: &mut R) -> Result<Dataset> {
    let n = d.question_count();
    let k = take.resolve(n)?;
    Ok(filter_questions(d, &pick(n, k, rng)))
}

/// Splits off `take` questions as a held-out set. Returns `(train, heldout)`.
pub fn split_heldout<R: Rng + ?Sized>(d: &Dataset, take: usize, rng: &mut R) -> Result<(Dataset, Dataset)> {
    let n = d.question_count();
    if take == 0 || take >= n {
        return Err(Error::Range(format!("held-out size {take} must be in 1..{n}")));
    }
    let held = pick(n, take, rng);
    let train: Vec<bool> = held.iter().map(|h| !h).collect();
    Ok((filter_questions(d, &train), filter_questions(d, &held)))
}

/// Concatenates 2.0 datasets. An id that occurs in more than one part is
/// rewritten as `<tag>:<id>` in every part that carries it.
pub fn merge(parts: &[(&str, &Dataset)]) -> Result<Dataset> {
    if let Some((tag, _)) = parts.iter().find(|(_, d)| d.version != Version::V20) {
        return Err(Error::Version(format!("part {tag:?} is not SQuAD 2.0; convert it first")));
    }
    let mut owners: HashMap<&str, usize> = HashMap::new();
    for (_, d) in parts {
        let ids: HashSet<&str> = d.questions().map(|q| q.id.as_str()).collect();
        for id in ids {
            *owners.entry(id).or_default() += 1;
        }
    }
    let colliding: HashSet<String> = owners.into_iter().filter(|&(_, n)| n > 1).map(|(id, _)| id.to_owned()).collect();

    let mut out = Dataset::empty(Version::V20);
    for (tag, d) in parts {
        for a in &d.articles {
            let mut a = a.clone();
            for q in a.paragraphs.iter_mut().flat_map(|p| p.qas.iter_mut()) {
                if colliding.contains(&q.id) {
                    q.id = format!("{tag}:{}", q.id);
                }
            }
            out.articles.push(a);
        }
    }
    let mut seen = HashSet::new();
    for q in out.questions() {
        if !seen.insert(q.id.as_str()) {
            return Err(Error::DuplicateId { id: q.id.clone(), path: "merge".into() });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub path: PathBuf,
    pub take: Take,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub name: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub sources: Vec<SourceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heldout_take: Option<usize>,
    /// Index of the source the held-out set is split from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heldout_source: Option<usize>,
}

fn default_seed() -> u64 {
    crate::DEFAULT_SEED
}

impl ExperimentManifest {
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let m: Self = serde_json::from_slice(bytes).map_err(|e| Error::Manifest(e.to_string()))?;
        m.check()?;
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&bytes)
    }

    pub fn check(&self) -> Result<()> {
        if self.sources.is_empty() {
            return Err(Error::Manifest(format!("{}: no sources", self.name)));
        }
        for s in &self.sources {
            match s.take {
                Take::Count(0) => return Err(Error::Manifest(format!("{}: take must be positive", s.path.display()))),
                Take::Fraction(f) if !(f > 0.0 && f <= 1.0) => {
                    return Err(Error::Manifest(format!("{}: fraction {f} outside (0, 1]", s.path.display())))
                }
                _ => {}
            }
        }
        if self.heldout_source.unwrap_or(0) >= self.sources.len() {
            return Err(Error::Manifest("heldout_source out of range".into()));
        }
        if self.heldout_take == Some(0) {
            return Err(Error::Manifest("heldout_take must be positive".into()));
        }
        Ok(())
    }

    pub fn tag(&self, i: usize) -> String {
        self.sources[i].tag.clone().unwrap_or_else(|| format!("p{i}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceReport {
    pub tag: String,
    pub path: PathBuf,
    pub population: usize,
    pub taken: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixReport {
    pub name: String,
    pub seed: u64,
    pub sources: Vec<SourceReport>,
    pub total: usize,
    pub unanswerable_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub heldout: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub dataset: Dataset,
    pub heldout: Option<Dataset>,
    pub report: MixReport,
}

const HELDOUT_STREAM: u64 = u64::MAX;

/// Builds an experiment from sources obtained through `load`. 1.1 sources are
/// converted to 2.0 before sampling.
pub fn build_experiment_with<F>(m: &ExperimentManifest, mut load: F) -> Result<Experiment>
where
    F: FnMut(&SourceSpec) -> Result<Dataset>,
{
    m.check()?;
    let heldout_source = m.heldout_source.unwrap_or(0);
    let mut sampled = Vec::with_capacity(m.sources.len());
    let mut reports = Vec::with_capacity(m.sources.len());
    let mut heldout = None;
    for (i, src) in m.sources.iter().enumerate() {
        let mut d = squad::convert_v11_to_v20(load(src)?).dataset;
        if i == heldout_source {
            if let Some(h) = m.heldout_take {
                let (train, held) = split_heldout(&d, h, &mut seed::sub_rng(m.seed, HELDOUT_STREAM))?;
                d = train;
                heldout = Some(held);
            }
        }
        let population = d.question_count();
        let s = sample_dataset(&d, src.take, &mut seed::sub_rng(m.seed, i as u64))
            .map_err(|e| Error::Manifest(format!("{}: {e}", src.path.display())))?;
        reports.push(SourceReport { tag: m.tag(i), path: src.path.clone(), population, taken: s.question_count() });
        sampled.push(s);
    }
    let tags: Vec<String> = (0..m.sources.len()).map(|i| m.tag(i)).collect();
    let parts: Vec<(&str, &Dataset)> = tags.iter().map(String::as_str).zip(&sampled).collect();
    let dataset = merge(&parts)?;
    let stats = compute_stats(&dataset);
    let report = MixReport {
        name: m.name.clone(),
        seed: m.seed,
        total: reports.iter().map(|r| r.taken).sum(),
        sources: reports,
        unanswerable_ratio: stats.unanswerable_ratio,
        heldout: heldout.as_ref().map(Dataset::question_count),
    };
    Ok(Experiment { dataset, heldout, report })
}

/// Builds an experiment reading source files relative to `base_dir`.
pub fn build_experiment(m: &ExperimentManifest, base_dir: impl AsRef<Path>) -> Result<Experiment> {
    let base = base_dir.as_ref();
    build_experiment_with(m, |src| {
        let path = base.join(&src.path);
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        squad::parse_dataset(&bytes)
    })
}
