//! Deterministic workloads for the benchmarks.

use umf_core::candidate::{Candidate, CandidateSet};

const VERB_FINAL: [&str; 4] = ["ළමයි උද්‍යානයේ සෙල්ලම් කරනවා", "මම පොත කියවනවා", "ඔහු ගෙදර ගියා", "අපි බත් කනවා"];

const VERB_MEDIAL: [&str; 4] = ["දරුවන් සෙල්ලම් උද්‍යානය", "මම කියවනවා පොත", "ඔහු ගියා ගෙදර", "අපි කනවා බත්"];

/// `sentences` candidate sets of `beam` candidates each. Odd ranks take a
/// verb-medial text, even ranks a verb-final one.
pub fn synthetic_sets(sentences: usize, beam: usize) -> Vec<CandidateSet> {
    (0..sentences)
        .map(|i| CandidateSet {
            sentence_id: format!("s{i:04}"),
            source_text: "The children play in the garden.".to_string(),
            target_lang: "si".to_string(),
            formal: None,
            candidates: (1..=beam as u32)
                .map(|rank| {
                    let pool = if rank % 2 == 1 { &VERB_MEDIAL } else { &VERB_FINAL };
                    let text = pool[(i + rank as usize) % pool.len()];
                    Candidate::new(text, -0.1 * f64::from(rank), rank)
                })
                .collect(),
        })
        .collect()
}
