//! Python bindings. Structured results (stats, reports, violations) are
//! returned as plain dicts and lists.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyAny;
use qasynth_core::squad;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Converts any serializable value to native Python objects via `json.loads`.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pymodule]
mod qasynth {
    use std::collections::BTreeMap;
    use std::path::PathBuf;

    use pyo3::prelude::*;
    use pyo3::types::PyAny;
    use qasynth_core::cloze::{self, GenerationConfig};
    use qasynth_core::corpus::parse_corpus;
    use qasynth_core::eval::{self, GainReport};
    use qasynth_core::mixer::{build_experiment, ExperimentManifest};
    use qasynth_core::squad::{self as sq, Version};
    use qasynth_core::unans;

    use super::{err, to_py};

    #[pymodule_export]
    const DEFAULT_SEED: u64 = qasynth_core::DEFAULT_SEED;

    /// A SQuAD dataset held in memory.
    #[pyclass(module = "qasynth")]
    pub struct Dataset {
        pub(crate) inner: super::squad::Dataset,
    }

    #[pymethods]
    impl Dataset {
        /// Parses SQuAD JSON given as `str` or `bytes`.
        #[staticmethod]
        fn from_json(data: &Bound<'_, PyAny>) -> PyResult<Self> {
            let bytes: Vec<u8> = match data.extract::<String>() {
                Ok(s) => s.into_bytes(),
                Err(_) => data.extract()?,
            };
            sq::parse_dataset(&bytes).map(|inner| Dataset { inner }).map_err(err)
        }

        #[pyo3(signature = (version = "2.0"))]
        fn to_json(&self, version: &str) -> PyResult<String> {
            let v: Version = version.parse().map_err(err)?;
            let bytes = sq::serialize_dataset(&self.inner, v).map_err(err)?;
            String::from_utf8(bytes).map_err(err)
        }

        #[getter]
        fn version(&self) -> String {
            self.inner.version.to_string()
        }

        fn question_count(&self) -> usize {
            self.inner.question_count()
        }

        fn __len__(&self) -> usize {
            self.inner.question_count()
        }

        fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
            to_py(py, &sq::compute_stats(&self.inner))
        }

        fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
            to_py(py, &sq::validate(&self.inner))
        }

        /// Returns a 2.0 copy. A 2.0 dataset is returned unchanged.
        fn to_v20(&self) -> Dataset {
            Dataset { inner: sq::convert_v11_to_v20(self.inner.clone()).dataset }
        }

        fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
            let text = self.to_json("2.0")?;
            py.import("json")?.call_method1("loads", (text,))
        }

        fn __repr__(&self) -> String {
            let s = sq::compute_stats(&self.inner);
            format!(
                "Dataset(version={}, articles={}, questions={})",
                self.inner.version, s.article_count, s.question_count
            )
        }
    }

    #[pyfunction]
    fn normalize_answer(text: &str) -> Vec<String> {
        eval::normalize_answer(text)
    }

    /// Token-level F1 between two normalized token lists.
    #[pyfunction]
    fn token_f1(pred: Vec<String>, gold: Vec<String>) -> f64 {
        eval::token_f1(&pred, &gold)
    }

    #[pyfunction]
    fn overlap_score(question: &str, context: &str) -> f64 {
        unans::overlap_score(question, context).value()
    }

    /// Answer candidates as `(text, answer_start, category)` tuples.
    #[pyfunction]
    fn extract_candidates(context: &str) -> Vec<(String, usize, String)> {
        cloze::extract_candidates(context)
            .into_iter()
            .map(|c| (c.span.text, c.span.answer_start, format!("{:?}", c.category).to_uppercase()))
            .collect()
    }

    #[pyfunction]
    #[pyo3(signature = (corpus_text, seed = DEFAULT_SEED, max_questions = 5, workers = 0))]
    fn generate_answerable(
        py: Python<'_>,
        corpus_text: &str,
        seed: u64,
        max_questions: usize,
        workers: usize,
    ) -> PyResult<Dataset> {
        let articles = parse_corpus(corpus_text).articles;
        let cfg = GenerationConfig { rng_seed: seed, max_questions_per_paragraph: max_questions, ..Default::default() };
        let out = py.detach(|| cloze::generate_answerable_corpus(&articles, &cfg, workers)).map_err(err)?;
        Ok(Dataset { inner: out.dataset })
    }

    /// `source` is corpus text or a `Dataset`; questions are generated from
    /// its contexts, so any existing questions are ignored.
    #[pyfunction]
    #[pyo3(signature = (source, seed = DEFAULT_SEED, max_questions = 5, strict = true, workers = 0))]
    fn generate_unanswerable(
        py: Python<'_>,
        source: &Bound<'_, PyAny>,
        seed: u64,
        max_questions: usize,
        strict: bool,
        workers: usize,
    ) -> PyResult<Dataset> {
        let cfg = GenerationConfig { rng_seed: seed, max_questions_per_paragraph: max_questions, ..Default::default() };
        let articles = match source.extract::<String>() {
            Ok(text) => parse_corpus(&text).articles,
            Err(_) => source.cast::<Dataset>()?.borrow().inner.articles.clone(),
        };
        let out = py.detach(|| unans::generate_unanswerable_corpus(&articles, &cfg, strict, workers)).map_err(err)?;
        Ok(Dataset { inner: out.dataset })
    }

    /// Scores `{id: prediction}` against `gold`; percentages in the result.
    #[pyfunction]
    #[pyo3(signature = (gold, predictions, per_question = false))]
    fn evaluate<'py>(
        py: Python<'py>,
        gold: &Dataset,
        predictions: BTreeMap<String, String>,
        per_question: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let mut report = eval::evaluate(&gold.inner, &predictions);
        if !per_question {
            report.per_question.clear();
        }
        to_py(py, &report)
    }

    #[pyfunction]
    fn gain<'py>(
        py: Python<'py>,
        baseline_f1: f64,
        baseline_em: f64,
        augmented_f1: f64,
        augmented_em: f64,
        added: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let g = GainReport::from_scores(baseline_f1, baseline_em, augmented_f1, augmented_em, added).map_err(err)?;
        to_py(py, &g)
    }

    /// Builds the mix described by a manifest file. Returns
    /// `(dataset, heldout_or_None, report)`.
    #[pyfunction]
    #[pyo3(signature = (manifest, base_dir = None))]
    fn mix<'py>(
        py: Python<'py>,
        manifest: PathBuf,
        base_dir: Option<PathBuf>,
    ) -> PyResult<(Dataset, Option<Dataset>, Bound<'py, PyAny>)> {
        let m = ExperimentManifest::load(&manifest).map_err(err)?;
        let base = base_dir.unwrap_or_else(|| manifest.parent().map(PathBuf::from).unwrap_or_default());
        let exp = py.detach(|| build_experiment(&m, &base)).map_err(err)?;
        let report = to_py(py, &exp.report)?;
        Ok((Dataset { inner: exp.dataset }, exp.heldout.map(|inner| Dataset { inner }), report))
    }
}
