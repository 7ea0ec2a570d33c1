//! Translation candidates and candidate sets.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub text: String,
    /// Generator-native confidence, higher is better. Absent for generators
    /// that only report ranks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_score: Option<f64>,
    /// 1 is the generator's top output.
    #[serde(alias = "rank")]
    pub original_rank: u32,
}

impl Candidate {
    pub fn new(text: impl Into<String>, model_score: f64, original_rank: u32) -> Self {
        Candidate {
            text: text.into(),
            model_score: Some(model_score),
            original_rank,
        }
    }

    /// Model score, or `-rank` for rank-only candidates.
    pub fn effective_model_score(&self) -> f64 {
        self.model_score.unwrap_or(-f64::from(self.original_rank))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CandidateError {
    #[error("candidate set is empty")]
    Empty,
    #[error("duplicate rank {0}")]
    DuplicateRank(u32),
    #[error("ranks must run 1..={expected} without gaps, found rank {found}")]
    NonContiguous { expected: usize, found: u32 },
    #[error("candidate at rank {0} has empty text")]
    EmptyText(u32),
    #[error("candidate at rank {0} has a non-finite model score")]
    NonFiniteScore(u32),
}

/// Checks ranks are unique and texts non-blank.
pub fn check_candidates(candidates: &[Candidate]) -> Result<(), CandidateError> {
    if candidates.is_empty() {
        return Err(CandidateError::Empty);
    }
    let mut seen = BTreeSet::new();
    for c in candidates {
        if !seen.insert(c.original_rank) {
            return Err(CandidateError::DuplicateRank(c.original_rank));
        }
        if c.text.trim().is_empty() {
            return Err(CandidateError::EmptyText(c.original_rank));
        }
        if c.model_score.is_some_and(|s| !s.is_finite()) {
            return Err(CandidateError::NonFiniteScore(c.original_rank));
        }
    }
    Ok(())
}

/// Like [`check_candidates`], and additionally requires ranks `1..=N`.
pub fn check_contiguous(candidates: &[Candidate]) -> Result<(), CandidateError> {
    check_candidates(candidates)?;
    let n = candidates.len();
    if let Some(bad) = candidates
        .iter()
        .find(|c| c.original_rank == 0 || c.original_rank as usize > n)
    {
        return Err(CandidateError::NonContiguous {
            expected: n,
            found: bad.original_rank,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub sentence_id: String,
    pub source_text: String,
    pub target_lang: String,
    /// Register flag carried through from the corpus, if known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formal: Option<bool>,
    pub candidates: Vec<Candidate>,
}

impl CandidateSet {
    pub fn validate(&self) -> Result<(), CandidateError> {
        check_contiguous(&self.candidates)
    }

    /// Candidates sorted by rank, truncated to the first `n`.
    pub fn top(&self, n: usize) -> Vec<Candidate> {
        let mut sorted = self.candidates.clone();
        sorted.sort_by_key(|c| c.original_rank);
        sorted.truncate(n);
        sorted
    }
}
