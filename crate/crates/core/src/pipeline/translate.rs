//! Batch translation: bias, fetch, rerank for every corpus sentence.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rerank::{RerankRequest, RerankResult, Reranker};

use super::generator::{fetch_candidates, CandidateSource, GeneratorRequest};
use super::{CorpusEntry, PipelineError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslateOptions {
    pub source_lang: String,
    pub target_lang: String,
    /// Sentences in flight at once.
    pub concurrency: usize,
}

impl Default for TranslateOptions {
    fn default() -> Self {
        TranslateOptions {
            source_lang: "en".into(),
            target_lang: "si".into(),
            concurrency: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceFailure {
    pub sentence_id: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslateSummary {
    pub total: usize,
    pub succeeded: usize,
    pub changed: usize,
    /// Percentage over succeeded sentences.
    pub change_rate: Option<f64>,
    pub failures: Vec<SentenceFailure>,
}

impl TranslateSummary {
    pub fn line(&self) -> String {
        let rate = self
            .change_rate
            .map_or_else(|| "n/a".to_string(), |r| format!("{r:.2}%"));
        format!(
            "{} sentences, {} reranked, {} changed, change rate {rate}, {} failed",
            self.total,
            self.succeeded,
            self.changed,
            self.failures.len()
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranslateOutput {
    /// Successful results in corpus order.
    pub results: Vec<RerankResult>,
    pub summary: TranslateSummary,
}

fn translate_one(
    entry: &CorpusEntry,
    source: &dyn CandidateSource,
    reranker: &Reranker<'_>,
    options: &TranslateOptions,
) -> Result<RerankResult, String> {
    let request = GeneratorRequest {
        source_text: entry.source_text.clone(),
        source_lang: options.source_lang.clone(),
        target_lang: options.target_lang.clone(),
        n: reranker.config().beam_width,
        bias: reranker.bias_for(&entry.source_text),
    };
    let (set, provenance) = fetch_candidates(source, &entry.sentence_id, &request).map_err(|e| e.to_string())?;
    let mut result = reranker
        .rerank(RerankRequest {
            sentence_id: Some(&entry.sentence_id),
            source_text: &entry.source_text,
            formal: entry.formal,
            candidates: &set.candidates,
        })
        .map_err(|e| e.to_string())?;
    result.provenance = Some(provenance);
    Ok(result)
}

/// Processes the corpus with bounded concurrency. Output order follows the
/// corpus; failed sentences are recorded in the summary and skipped.
pub fn run_translate(
    corpus: &[CorpusEntry],
    source: &dyn CandidateSource,
    reranker: &Reranker<'_>,
    options: &TranslateOptions,
) -> Result<TranslateOutput, PipelineError> {
    if corpus.is_empty() {
        return Err(PipelineError::EmptyCorpus);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.concurrency.max(1))
        .build()
        .map_err(|e| PipelineError::ThreadPool(e.to_string()))?;
    let outcomes: Vec<Result<RerankResult, String>> = pool.install(|| {
        corpus
            .par_iter()
            .map(|e| translate_one(e, source, reranker, options))
            .collect()
    });

    let mut results = Vec::with_capacity(corpus.len());
    let mut failures = Vec::new();
    for (entry, outcome) in corpus.iter().zip(outcomes) {
        match outcome {
            Ok(r) => results.push(r),
            Err(error) => {
                log::error!("sentence `{}` failed: {error}", entry.sentence_id);
                failures.push(SentenceFailure {
                    sentence_id: entry.sentence_id.clone(),
                    error,
                });
            }
        }
    }
    let changed = results.iter().filter(|r| r.changed).count();
    let change_rate = crate::metrics::change_rate(&results).ok();
    Ok(TranslateOutput {
        summary: TranslateSummary {
            total: corpus.len(),
            succeeded: results.len(),
            changed,
            change_rate,
            failures,
        },
        results,
    })
}
