use std::path::Path;

use anyhow::{Context, Result};
use qasynth_core::cloze::{GenerationConfig, MASK_TOKEN};
use qasynth_core::DEFAULT_SEED;
use serde::{Deserialize, Serialize};

use crate::{Command, GlobalArgs};

/// Settings readable from `--config`. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub quiet: Option<bool>,
    pub max_questions: Option<usize>,
    pub max_paragraph_chars: Option<usize>,
    pub mask_token: Option<String>,
    pub translator: Option<String>,
    pub strict: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_slice(&bytes).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Effective settings after merging flags over the config file over defaults.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub seed: u64,
    /// Whether the seed came from a flag or the config file.
    #[serde(skip)]
    pub seed_explicit: bool,
    pub workers: usize,
    pub quiet: bool,
    pub max_questions: usize,
    pub max_paragraph_chars: usize,
    pub mask_token: String,
    pub translator: String,
    pub strict: bool,
}

impl RunConfig {
    pub fn resolve(global: &GlobalArgs, command: &Command, file: FileConfig) -> Self {
        let (name, max_q, max_chars, mask, translator, no_strict) = match command {
            Command::GenerateAns(a) => (
                "generate-ans",
                a.max_questions,
                a.max_paragraph_chars,
                a.mask_token.clone(),
                a.translator.clone(),
                false,
            ),
            Command::GenerateUnans(u) => (
                "generate-unans",
                u.gen.max_questions,
                u.gen.max_paragraph_chars,
                u.gen.mask_token.clone(),
                u.gen.translator.clone(),
                u.no_strict,
            ),
            Command::Convert(_) => ("convert", None, None, None, None, false),
            Command::Mix(_) => ("mix", None, None, None, None, false),
            Command::Evaluate(_) => ("evaluate", None, None, None, None, false),
            Command::Stats(_) => ("stats", None, None, None, None, false),
            Command::Validate(_) => ("validate", None, None, None, None, false),
            Command::Gain(_) => ("gain", None, None, None, None, false),
        };
        let defaults = GenerationConfig::default();
        RunConfig {
            command: name,
            seed: global.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            seed_explicit: global.seed.is_some() || file.seed.is_some(),
            workers: global.workers.or(file.workers).unwrap_or(0),
            quiet: global.quiet || file.quiet.unwrap_or(false),
            max_questions: max_q.or(file.max_questions).unwrap_or(defaults.max_questions_per_paragraph),
            max_paragraph_chars: max_chars
                .or(file.max_paragraph_chars)
                .unwrap_or(qasynth_core::corpus::CorpusOptions::default().max_paragraph_chars),
            mask_token: mask.or(file.mask_token).unwrap_or_else(|| MASK_TOKEN.to_string()),
            translator: translator.or(file.translator).unwrap_or_else(|| "rule".to_string()),
            strict: if no_strict { false } else { file.strict.unwrap_or(true) },
        }
    }

    pub fn generation(&self) -> Result<GenerationConfig> {
        let translator = self.translator.parse().map_err(anyhow::Error::msg)?;
        Ok(GenerationConfig {
            max_questions_per_paragraph: self.max_questions,
            mask_token: self.mask_token.clone(),
            rng_seed: self.seed,
            translator,
        })
    }
}
