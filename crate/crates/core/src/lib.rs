//! Synthetic extractive-QA data toolkit.
//!
//! The crate covers the full data path around an extractive question
//! answering model:
//!
//! * [`squad`]: the SQuAD object graph, JSON reader/writer, validation and
//!   statistics, plus the plain-text article corpus reader in [`corpus`].
//! * [`cloze`]: answerable question generation (candidate extraction,
//!   sub-clause selection, cloze construction, cloze-to-question translation).
//! * [`unans`]: unanswerable question generation by moving generated
//!   questions to sibling paragraphs of the same article.
//! * [`mixer`]: seeded sampling, merging and experiment assembly.
//! * [`eval`]: exact-match / F1 scoring and augmentation gain analysis.

pub mod cloze;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod mixer;
mod par;
pub mod seed;
pub mod squad;
pub mod text;
pub mod unans;

pub use error::{Error, Result};
pub use squad::{AnswerSpan, Article, Dataset, DatasetStats, Paragraph, QuestionAnswer, Version};

/// Seed used whenever the caller does not supply one.
pub const DEFAULT_SEED: u64 = 20200;
