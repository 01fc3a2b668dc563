mod commands;
mod config;
mod log;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Synthetic SQuAD-style question generation, dataset mixing and scoring.
#[derive(Debug, Parser)]
#[command(name = "qasynth", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// RNG seed for every random choice [default: 20200]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; standard output when omitted
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    /// Suppress informational logging
    #[arg(long, short, global = true)]
    pub quiet: bool,
    /// JSON file with default settings; explicit flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Emit logs as line-delimited JSON
    #[arg(long, global = true)]
    pub log_json: bool,
    /// Worker threads; 0 uses all cores. Output does not depend on this.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate answerable questions from a plain-text corpus
    GenerateAns(GenerationArgs),
    /// Generate questions and move each to another paragraph of its article
    GenerateUnans(GenerateUnansArgs),
    /// Convert a SQuAD file to another format version
    Convert(ConvertArgs),
    /// Build a training mix from an experiment manifest
    Mix(MixArgs),
    /// Score predictions against a gold SQuAD file
    Evaluate(EvaluateArgs),
    /// Print dataset statistics as JSON
    Stats(InputArgs),
    /// List schema and span violations; exits nonzero if any are found
    Validate(InputArgs),
    /// Score change per 1,000 added examples between two evaluations
    Gain(GainArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// SQuAD JSON file
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerationArgs {
    /// Corpus file ("= Title =" lines, blank-line separated paragraphs) or a
    /// SQuAD JSON file whose contexts are used
    pub input: PathBuf,
    /// Questions per paragraph [default: 5]
    #[arg(long)]
    pub max_questions: Option<usize>,
    /// Corpus paragraphs longer than this many characters are truncated [default: 2000]
    #[arg(long)]
    pub max_paragraph_chars: Option<usize>,
    /// Mask token used in cloze statements [default: [MASK]]
    #[arg(long)]
    pub mask_token: Option<String>,
    /// Cloze translator [default: rule]
    #[arg(long)]
    pub translator: Option<String>,
    /// Write per-article reports as JSON lines
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateUnansArgs {
    #[command(flatten)]
    pub gen: GenerationArgs,
    /// Keep questions whose original answer text occurs in the new context
    #[arg(long)]
    pub no_strict: bool,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    pub input: PathBuf,
    /// Target version
    #[arg(long, default_value = "2.0")]
    pub to: String,
}

#[derive(Debug, Args)]
pub struct MixArgs {
    /// Experiment manifest
    pub manifest: PathBuf,
    /// Directory source paths are resolved against [default: manifest directory]
    #[arg(long)]
    pub base_dir: Option<PathBuf>,
    /// Where to write the held-out split
    #[arg(long)]
    pub heldout_out: Option<PathBuf>,
    /// Where to write the mix report
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Gold SQuAD file
    pub gold: PathBuf,
    /// JSON object mapping question id to predicted text ("" means no answer)
    pub predictions: PathBuf,
    /// Include per-question scores in the report
    #[arg(long)]
    pub per_question: bool,
    /// Print a fixed-width table instead of JSON
    #[arg(long)]
    pub table: bool,
}

#[derive(Debug, Args)]
pub struct GainArgs {
    /// Baseline evaluation report (JSON from `evaluate`)
    #[arg(long, required_unless_present_all = ["baseline_f1", "baseline_em"])]
    pub baseline: Option<PathBuf>,
    /// Augmented evaluation report (JSON from `evaluate`)
    #[arg(long, required_unless_present_all = ["augmented_f1", "augmented_em"])]
    pub augmented: Option<PathBuf>,
    #[arg(long, conflicts_with = "baseline")]
    pub baseline_f1: Option<f64>,
    #[arg(long, conflicts_with = "baseline")]
    pub baseline_em: Option<f64>,
    #[arg(long, conflicts_with = "augmented")]
    pub augmented_f1: Option<f64>,
    #[arg(long, conflicts_with = "augmented")]
    pub augmented_em: Option<f64>,
    /// Number of examples added between the two runs
    #[arg(long)]
    pub added: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let logger = log::Logger::new(cli.global.quiet, cli.global.log_json);
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            logger.error(&format!("{e:#}"));
            ExitCode::FAILURE
        }
    }
}
