//! Sense constraints for polysemous source words.
//!
//! A lexicon maps a source lemma to two or more senses, each with target
//! forms and weighted context indicators. Resolved senses feed two places: a
//! bias map sent to generators that accept logit adjustments, and a
//! candidate-level compliance score used as a gate during reranking.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::text::{nfc, source_words};

pub const DEFAULT_BOOST: f64 = 1.0;
pub const DEFAULT_PENALTY: f64 = 0.5;
/// Minimum lead of the best sense over the runner-up for a confident resolution.
pub const CONFIDENCE_MARGIN: f64 = 1.0;

const MARGIN_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum IndicatorSpec {
    Weighted(BTreeMap<String, f64>),
    Plain(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sense {
    pub sense_id: String,
    pub target_forms: Vec<String>,
    /// Context word to weight. A plain list of words in the file gets weight 1.0.
    #[serde(deserialize_with = "indicators_from_spec")]
    pub indicators: BTreeMap<String, f64>,
}

fn indicators_from_spec<'de, D: serde::Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
    Ok(match IndicatorSpec::deserialize(d)? {
        IndicatorSpec::Weighted(map) => map.into_iter().map(|(k, v)| (k.to_lowercase(), v)).collect(),
        IndicatorSpec::Plain(words) => words.into_iter().map(|w| (w.to_lowercase(), 1.0)).collect(),
    })
}

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed lexicon: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("lexicon entry `{lemma}`: {reason}")]
    Invalid { lemma: String, reason: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LexiconFile {
    entries: BTreeMap<String, Vec<Sense>>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SenseLexicon {
    entries: BTreeMap<String, Vec<Sense>>,
    /// Inflected surface form to lemma, for single-word lemmas.
    forms: HashMap<String, String>,
    max_phrase_len: usize,
}

/// Regular English inflections of a lemma.
fn inflections(lemma: &str) -> Vec<String> {
    let mut out = vec![
        lemma.to_string(),
        format!("{lemma}s"),
        format!("{lemma}es"),
        format!("{lemma}ing"),
        format!("{lemma}ed"),
    ];
    if let Some(stem) = lemma.strip_suffix('e') {
        out.push(format!("{stem}ing"));
        out.push(format!("{lemma}d"));
    }
    out
}

impl SenseLexicon {
    pub fn new(entries: BTreeMap<String, Vec<Sense>>) -> Result<Self, LexiconError> {
        let mut normalized = BTreeMap::new();
        for (lemma, mut senses) in entries {
            let lemma = lemma.trim().to_lowercase();
            let invalid = |reason: String| LexiconError::Invalid {
                lemma: lemma.clone(),
                reason,
            };
            if senses.len() < 2 {
                return Err(invalid(format!("needs at least 2 senses, has {}", senses.len())));
            }
            let mut ids = BTreeSet::new();
            let mut forms = BTreeSet::new();
            for sense in &mut senses {
                if !ids.insert(sense.sense_id.clone()) {
                    return Err(invalid(format!("duplicate sense id `{}`", sense.sense_id)));
                }
                for form in &mut sense.target_forms {
                    *form = nfc(form.trim());
                    if form.is_empty() {
                        return Err(invalid(format!("sense `{}` has an empty target form", sense.sense_id)));
                    }
                    if !forms.insert(form.clone()) {
                        return Err(invalid(format!("target form `{form}` appears in more than one sense")));
                    }
                }
                if let Some((word, w)) = sense.indicators.iter().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
                    return Err(invalid(format!("indicator `{word}` has non-positive weight {w}")));
                }
            }
            normalized.insert(lemma, senses);
        }

        let mut forms = HashMap::new();
        let mut max_phrase_len = 1;
        for lemma in normalized.keys() {
            let words = lemma.split_whitespace().count();
            if words > 1 {
                max_phrase_len = max_phrase_len.max(words);
                continue;
            }
            for form in inflections(lemma) {
                forms.entry(form).or_insert_with(|| lemma.clone());
            }
        }
        // Exact lemmas take precedence over generated inflections.
        for lemma in normalized.keys() {
            forms.insert(lemma.clone(), lemma.clone());
        }

        Ok(SenseLexicon {
            entries: normalized,
            forms,
            max_phrase_len,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self, LexiconError> {
        let file: LexiconFile = serde_json::from_str(text)?;
        Self::new(file.entries)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    /// The bundled lexicon with the English "play" entry.
    pub fn starter() -> Self {
        Self::from_json_str(include_str!("../data/lexicon.json")).expect("bundled lexicon is valid")
    }

    pub fn senses(&self, lemma: &str) -> Option<&[Sense]> {
        self.entries.get(lemma).map(Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbiguityHit {
    /// Surface word(s) as they appear, lowercased.
    pub source_word: String,
    pub lemma: String,
    /// Index of the first word of the hit in the source word list.
    pub word_index: usize,
    /// Number of source words covered.
    pub word_count: usize,
}

/// One hit per source word (or phrase) whose lemma is in the lexicon, in order.
pub fn detect_ambiguities(source_text: &str, lexicon: &SenseLexicon) -> Vec<AmbiguityHit> {
    detect_in_words(&source_words(source_text), lexicon)
}

fn detect_in_words(words: &[String], lexicon: &SenseLexicon) -> Vec<AmbiguityHit> {
    let mut hits = Vec::new();
    let mut i = 0;
    while i < words.len() {
        let mut matched = None;
        for n in (2..=lexicon.max_phrase_len.min(words.len() - i)).rev() {
            let phrase = words[i..i + n].join(" ");
            if lexicon.entries.contains_key(&phrase) {
                matched = Some((phrase.clone(), phrase, n));
                break;
            }
        }
        if matched.is_none() {
            if let Some(lemma) = lexicon.forms.get(&words[i]) {
                matched = Some((words[i].clone(), lemma.clone(), 1));
            }
        }
        match matched {
            Some((source_word, lemma, n)) => {
                hits.push(AmbiguityHit {
                    source_word,
                    lemma,
                    word_index: i,
                    word_count: n,
                });
                i += n;
            }
            None => i += 1,
        }
    }
    hits
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SenseResolution {
    pub source_word: String,
    pub lemma: String,
    pub chosen: String,
    pub score_by_sense: BTreeMap<String, f64>,
    pub confident: bool,
}

/// Scores each sense by the indicator weights present in the context and
/// picks the best; ties go to the earlier sense and are never confident.
pub fn resolve_sense(hit: &AmbiguityHit, lexicon: &SenseLexicon, source_words: &[String]) -> SenseResolution {
    let senses = lexicon.senses(&hit.lemma).expect("hits come from the same lexicon");
    let context: BTreeSet<&str> = source_words
        .iter()
        .enumerate()
        .filter(|(i, _)| !(hit.word_index..hit.word_index + hit.word_count).contains(i))
        .map(|(_, w)| w.as_str())
        .collect();

    let scores: Vec<f64> = senses
        .iter()
        .map(|s| {
            s.indicators
                .iter()
                .filter(|(word, _)| context.contains(word.as_str()))
                .map(|(_, w)| w)
                .sum()
        })
        .collect();

    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    let runner_up = scores
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != best)
        .map(|(_, s)| *s)
        .fold(f64::NEG_INFINITY, f64::max);
    let confident = scores[best] - runner_up >= CONFIDENCE_MARGIN - MARGIN_EPSILON;

    SenseResolution {
        source_word: hit.source_word.clone(),
        lemma: hit.lemma.clone(),
        chosen: senses[best].sense_id.clone(),
        score_by_sense: senses
            .iter()
            .zip(&scores)
            .map(|(s, v)| (s.sense_id.clone(), *v))
            .collect(),
        confident,
    }
}

/// Detects and resolves every ambiguous word of a source sentence.
pub fn resolve_all(source_text: &str, lexicon: &SenseLexicon) -> Vec<SenseResolution> {
    let words = source_words(source_text);
    detect_in_words(&words, lexicon)
        .iter()
        .map(|hit| resolve_sense(hit, lexicon, &words))
        .collect()
}

/// Logit adjustments keyed by target form.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BiasMap {
    pub adjustments: BTreeMap<String, f64>,
}

impl BiasMap {
    pub fn is_empty(&self) -> bool {
        self.adjustments.is_empty()
    }
}

fn split_senses<'a>(resolution: &SenseResolution, lexicon: &'a SenseLexicon) -> (Vec<&'a str>, Vec<&'a str>) {
    let mut chosen = Vec::new();
    let mut rejected = Vec::new();
    for sense in lexicon.senses(&resolution.lemma).unwrap_or_default() {
        let bucket = if sense.sense_id == resolution.chosen {
            &mut chosen
        } else {
            &mut rejected
        };
        bucket.extend(sense.target_forms.iter().map(String::as_str));
    }
    (chosen, rejected)
}

/// `+boost` on chosen-sense forms and `-penalty` on rejected-sense forms, for
/// confident resolutions only. A form boosted by any resolution is never
/// penalized.
pub fn build_bias_map(resolutions: &[SenseResolution], lexicon: &SenseLexicon, boost: f64, penalty: f64) -> BiasMap {
    let mut boosted = BTreeSet::new();
    let mut penalized = BTreeSet::new();
    for r in resolutions.iter().filter(|r| r.confident) {
        let (chosen, rejected) = split_senses(r, lexicon);
        boosted.extend(chosen);
        penalized.extend(rejected);
    }
    let mut adjustments: BTreeMap<String, f64> = penalized
        .difference(&boosted)
        .map(|f| (f.to_string(), -penalty))
        .collect();
    adjustments.extend(boosted.into_iter().map(|f| (f.to_string(), boost)));
    BiasMap { adjustments }
}

/// Mean over confident resolutions of 1.0 (chosen form only), 0.0 (rejected
/// form only) or 0.5 (neither, or both). No confident resolutions gives 1.0.
pub fn score_sense_compliance(candidate_text: &str, resolutions: &[SenseResolution], lexicon: &SenseLexicon) -> f64 {
    let text = nfc(candidate_text);
    let per: Vec<f64> = resolutions
        .iter()
        .filter(|r| r.confident)
        .map(|r| {
            let (chosen, rejected) = split_senses(r, lexicon);
            let has_chosen = chosen.iter().any(|f| text.contains(f));
            let has_rejected = rejected.iter().any(|f| text.contains(f));
            match (has_chosen, has_rejected) {
                (true, false) => 1.0,
                (false, true) => 0.0,
                _ => 0.5,
            }
        })
        .collect();
    if per.is_empty() {
        1.0
    } else {
        per.iter().sum::<f64>() / per.len() as f64
    }
}
