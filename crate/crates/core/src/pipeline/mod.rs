//! Corpus-level orchestration: candidate acquisition, batch reranking, evaluation.

mod evaluate;
mod generator;
mod translate;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub use evaluate::run_evaluate;
pub use generator::{
    fetch_candidates, CandidateSource, FileSource, GeneratorError, GeneratorRequest, GeneratorResponse, HttpSource,
    RetryPolicy, WireCandidate, GENERATOR_TOKEN_ENV, GENERATOR_URL_ENV,
};
pub use translate::{run_translate, SentenceFailure, TranslateOptions, TranslateOutput, TranslateSummary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub sentence_id: String,
    pub source_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formal: Option<bool>,
    /// Free-form phenomenon tags.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phenomena: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {source}")]
    Parse {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("unknown sentence id `{0}`")]
    IdMismatch(String),
    #[error("duplicate sentence id `{0}`")]
    DuplicateId(String),
    #[error(transparent)]
    Metrics(#[from] crate::metrics::MetricsError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads one JSON value per non-blank line.
pub fn read_jsonl<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>, PipelineError> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path).map_err(io_error(path))?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io_error(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|source| PipelineError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?;
        out.push(value);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: impl AsRef<Path>, items: &[T]) -> Result<(), PipelineError> {
    let path = path.as_ref();
    let mut w = BufWriter::new(File::create(path).map_err(io_error(path))?);
    write_jsonl_to(&mut w, items).map_err(io_error(path))?;
    w.flush().map_err(io_error(path))
}

pub fn write_jsonl_to<T: Serialize, W: Write>(w: &mut W, items: &[T]) -> std::io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut *w, item)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<CorpusEntry>, PipelineError> {
    let corpus: Vec<CorpusEntry> = read_jsonl(path)?;
    let mut seen = std::collections::HashSet::new();
    for e in &corpus {
        if !seen.insert(e.sentence_id.as_str()) {
            return Err(PipelineError::DuplicateId(e.sentence_id.clone()));
        }
    }
    Ok(corpus)
}
