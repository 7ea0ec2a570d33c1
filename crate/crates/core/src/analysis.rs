//! Source-side cue detection: negation, register and relative clauses.
//!
//! The default analyzer uses short English keyword lists. Anything
//! implementing [`SourceAnalyzer`] can replace it.

use serde::{Deserialize, Serialize};

use crate::text::source_words;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Register {
    Formal,
    Informal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceAnalysis {
    /// Lowercased source words.
    pub words: Vec<String>,
    pub negated: bool,
    /// `None` when no register cue was found.
    pub register: Option<Register>,
    pub has_relative_clause: bool,
}

pub trait SourceAnalyzer: Send + Sync {
    /// `formal` is an externally supplied register flag; it overrides detection.
    fn analyze(&self, source_text: &str, formal: Option<bool>) -> SourceAnalysis;
}

const NEGATORS: &[&str] = &[
    "not", "no", "never", "nobody", "nothing", "none", "neither", "nor", "nowhere", "cannot",
];
const FORMAL_CUES: &[&str] = &[
    "please",
    "kindly",
    "sir",
    "madam",
    "ma'am",
    "mr",
    "mrs",
    "ms",
    "dr",
    "respected",
    "dear",
    "sincerely",
    "regards",
    "honourable",
    "honorable",
];
const FORMAL_BIGRAMS: &[(&str, &str)] = &[("would", "you"), ("could", "you"), ("may", "i")];
const INFORMAL_CUES: &[&str] = &[
    "hey", "hi", "yeah", "yep", "gonna", "wanna", "gotta", "dude", "buddy", "guys", "kinda", "ya", "lol",
];
const RELATIVE_PRONOUNS: &[&str] = &["who", "whom", "whose", "which", "that"];

/// Keyword-list analyzer for English sources.
#[derive(Debug, Clone, Copy, Default)]
pub struct KeywordAnalyzer;

impl SourceAnalyzer for KeywordAnalyzer {
    fn analyze(&self, source_text: &str, formal: Option<bool>) -> SourceAnalysis {
        let words = source_words(source_text);
        let negated = words
            .iter()
            .any(|w| NEGATORS.contains(&w.as_str()) || w.ends_with("n't"));

        let register = match formal {
            Some(true) => Some(Register::Formal),
            Some(false) => Some(Register::Informal),
            None => {
                let formal_hits = words.iter().filter(|w| FORMAL_CUES.contains(&w.as_str())).count()
                    + words
                        .windows(2)
                        .filter(|p| FORMAL_BIGRAMS.contains(&(p[0].as_str(), p[1].as_str())))
                        .count();
                let informal_hits = words.iter().filter(|w| INFORMAL_CUES.contains(&w.as_str())).count();
                match (formal_hits, informal_hits) {
                    (0, 0) => None,
                    (f, i) if f > i => Some(Register::Formal),
                    _ => Some(Register::Informal),
                }
            }
        };

        // Sentence-initial wh-words are usually interrogative.
        let has_relative_clause = words.iter().skip(1).any(|w| RELATIVE_PRONOUNS.contains(&w.as_str()));

        SourceAnalysis {
            words,
            negated,
            register,
            has_relative_clause,
        }
    }
}
