use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use qasynth_core::cloze::generate_answerable_corpus;
use qasynth_core::corpus::{parse_corpus_with, CorpusOptions};
use qasynth_core::eval::{self, EvalReport, GainReport};
use qasynth_core::mixer::{build_experiment, ExperimentManifest};
use qasynth_core::squad::{self, Article, Dataset, Version};
use qasynth_core::unans::generate_unanswerable_corpus;
use serde::Serialize;
use serde_json::json;

use crate::config::{FileConfig, RunConfig};
use crate::log::Logger;
use crate::{Cli, Command, ConvertArgs, EvaluateArgs, GainArgs, GenerateUnansArgs, GenerationArgs, MixArgs};

pub fn run(cli: Cli) -> Result<()> {
    let file = match &cli.global.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::resolve(&cli.global, &cli.command, file);
    let log = Logger::new(cfg.quiet, cli.global.log_json);
    log.info_with("effective config", serde_json::to_value(&cfg)?);

    let out = cli.global.out.as_deref();
    match &cli.command {
        Command::GenerateAns(a) => generate_ans(a, &cfg, out, &log),
        Command::GenerateUnans(a) => generate_unans(a, &cfg, out, &log),
        Command::Convert(a) => convert(a, out, &log),
        Command::Mix(a) => mix(a, &cfg, out, &log),
        Command::Evaluate(a) => evaluate(a, out, &log),
        Command::Stats(a) => {
            let d = read_dataset(&a.input)?;
            emit(out, &to_json(&squad::compute_stats(&d))?)
        }
        Command::Validate(a) => {
            let d = read_dataset(&a.input)?;
            let violations = squad::validate(&d);
            emit(out, &to_json(&violations)?)?;
            if !violations.is_empty() {
                bail!("{} violation(s) in {}", violations.len(), a.input.display());
            }
            Ok(())
        }
        Command::Gain(a) => gain(a, out),
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn read_dataset(path: &Path) -> Result<Dataset> {
    squad::parse_dataset(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

/// Writes machine output to `out`, or to stdout when no path is given.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut buf = Vec::new();
    for r in rows {
        serde_json::to_writer(&mut buf, r)?;
        buf.push(b'\n');
    }
    write_file(path, &buf)
}

fn dataset_bytes(d: &Dataset, version: Version) -> Result<Vec<u8>> {
    let mut bytes = squad::serialize_dataset(d, version)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Reads generation input: a plain-text corpus, or SQuAD JSON whose contexts
/// are used (existing questions are ignored).
fn read_articles(path: &Path, cfg: &RunConfig, log: &Logger) -> Result<Vec<Article>> {
    let bytes = read(path)?;
    if bytes.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'{') {
        let mut d = read_dataset(path)?;
        for p in d.articles.iter_mut().flat_map(|a| a.paragraphs.iter_mut()) {
            p.qas.clear();
        }
        return Ok(d.articles);
    }
    let text = String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let corpus = parse_corpus_with(&text, CorpusOptions { max_paragraph_chars: cfg.max_paragraph_chars });
    for w in &corpus.warnings {
        log.warn(w);
    }
    Ok(corpus.articles)
}

fn generate_ans(a: &GenerationArgs, cfg: &RunConfig, out: Option<&Path>, log: &Logger) -> Result<()> {
    let gen = cfg.generation()?;
    let articles = read_articles(&a.input, cfg, log)?;
    let result = generate_answerable_corpus(&articles, &gen, cfg.workers)?;
    emit(out, &dataset_bytes(&result.dataset, Version::V20)?)?;
    if let Some(p) = &a.report {
        write_jsonl(p, &result.reports)?;
    }
    log.info_with(
        "generated answerable questions",
        json!({ "articles": articles.len(), "questions": result.dataset.question_count() }),
    );
    Ok(())
}

fn generate_unans(a: &GenerateUnansArgs, cfg: &RunConfig, out: Option<&Path>, log: &Logger) -> Result<()> {
    let gen = cfg.generation()?;
    let articles = read_articles(&a.gen.input, cfg, log)?;
    let result = generate_unanswerable_corpus(&articles, &gen, cfg.strict, cfg.workers)?;
    emit(out, &dataset_bytes(&result.dataset, Version::V20)?)?;
    if let Some(p) = &a.gen.report {
        write_jsonl(p, &result.reports)?;
    }
    let skipped = result.reports.iter().filter(|r| r.skipped_reason.is_some()).count();
    let dropped: usize = result.reports.iter().map(|r| r.dropped_strict).sum();
    log.info_with(
        "generated unanswerable questions",
        json!({
            "questions": result.dataset.question_count(),
            "articles_skipped": skipped,
            "dropped_strict": dropped,
        }),
    );
    Ok(())
}

fn convert(a: &ConvertArgs, out: Option<&Path>, log: &Logger) -> Result<()> {
    let target: Version = a.to.parse()?;
    let d = read_dataset(&a.input)?;
    let d = match target {
        Version::V20 => {
            let c = squad::convert_v11_to_v20(d);
            if let Some(w) = &c.warning {
                log.warn(w);
            }
            c.dataset
        }
        Version::V11 => d,
    };
    emit(out, &dataset_bytes(&d, target)?)
}

fn mix(a: &MixArgs, cfg: &RunConfig, out: Option<&Path>, log: &Logger) -> Result<()> {
    let mut manifest = ExperimentManifest::load(&a.manifest)?;
    // the manifest's own seed applies unless one is supplied explicitly
    if cfg.seed_explicit {
        manifest.seed = cfg.seed;
    }
    let base = match &a.base_dir {
        Some(b) => b.clone(),
        None => a.manifest.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    let exp = build_experiment(&manifest, &base)?;
    emit(out, &dataset_bytes(&exp.dataset, Version::V20)?)?;
    match (&exp.heldout, &a.heldout_out) {
        (Some(h), Some(p)) => write_file(p, &dataset_bytes(h, Version::V20)?)?,
        (Some(_), None) => log.warn("manifest defines a held-out split but --heldout-out was not given"),
        (None, Some(_)) => bail!("--heldout-out given but the manifest has no heldout_take"),
        (None, None) => {}
    }
    if let Some(p) = &a.report {
        write_file(p, &to_json(&exp.report)?)?;
    }
    log.info_with("mix report", serde_json::to_value(&exp.report)?);
    Ok(())
}

fn evaluate(a: &EvaluateArgs, out: Option<&Path>, log: &Logger) -> Result<()> {
    let gold = read_dataset(&a.gold)?;
    let preds = eval::parse_predictions(&read(&a.predictions)?)
        .with_context(|| format!("parsing {}", a.predictions.display()))?;
    let mut report = eval::evaluate(&gold, &preds);
    if report.missing > 0 {
        log.warn(&format!("{} gold question(s) have no prediction and score zero", report.missing));
    }
    if !a.per_question {
        report.per_question.clear();
    }
    if a.table {
        emit(out, report.to_table().as_bytes())
    } else {
        emit(out, &to_json(&report)?)
    }
}

fn read_report(path: &Path) -> Result<EvalReport> {
    serde_json::from_slice(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn gain(a: &GainArgs, out: Option<&Path>) -> Result<()> {
    let scores = |file: &Option<std::path::PathBuf>, f1: Option<f64>, em: Option<f64>| -> Result<(f64, f64)> {
        match (file, f1, em) {
            (Some(p), _, _) => read_report(p).map(|r| (r.f1, r.exact)),
            (None, Some(f1), Some(em)) => Ok((f1, em)),
            _ => bail!("each side needs a report file or both --*-f1 and --*-em"),
        }
    };
    let (bf, be) = scores(&a.baseline, a.baseline_f1, a.baseline_em)?;
    let (af, ae) = scores(&a.augmented, a.augmented_f1, a.augmented_em)?;
    let g = GainReport::from_scores(bf, be, af, ae, a.added)?;
    emit(out, &to_json(&g)?)
}
