//! Per-dimension compliance scorers and the directive-weighted UMF score.
//!
//! Every scorer inspects surface markers from the target profile and returns
//! a score in [0, 1] together with the `(marker, byte offset)` matches that
//! produced it. Matching is plain suffix comparison on NFC tokens.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::{Register, SourceAnalysis};
use crate::candidate::Candidate;
use crate::dimension::DimensionId;
use crate::directive::DirectiveVector;
use crate::profile::{LanguageProfile, MarkerRole};
use crate::text::{tokenize_target, EmptyText, Token};

/// Shortest mean token length that earns any morphology credit.
pub const MORPHOLOGY_MIN_LENGTH: f64 = 3.0;
/// Extra mean length expected per unit of morphological complexity.
pub const MORPHOLOGY_SPAN: f64 = 6.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScoreError {
    #[error(transparent)]
    EmptyText(#[from] EmptyText),
    #[error("{dimension}: target profile has no {role:?} markers")]
    MissingMarkers { dimension: DimensionId, role: MarkerRole },
    #[error("no surface scorer for {0}")]
    UnsupportedDimension(DimensionId),
    #[error("target word_order must be categorical")]
    NotCategorical,
    #[error("no active, applicable dimensions to score")]
    NoActiveDimensions,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub marker: String,
    /// Byte offset of the marker in the candidate text.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionScore {
    pub dimension: DimensionId,
    pub score: f64,
    #[serde(default)]
    pub evidence: Vec<Evidence>,
}

impl DimensionScore {
    fn new(dimension: DimensionId, score: f64, evidence: Vec<Evidence>) -> Self {
        DimensionScore {
            dimension,
            score: score.clamp(0.0, 1.0),
            evidence,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DimensionOutcome {
    Scored(DimensionScore),
    NotApplicable { dimension: DimensionId, reason: String },
}

/// Marker suffix on `token`, preferring the longest marker.
fn suffix_match(token: &Token<'_>, markers: &[&str]) -> Option<Evidence> {
    markers
        .iter()
        .filter(|m| !m.is_empty() && token.text.ends_with(**m))
        .max_by_key(|m| m.len())
        .map(|m| Evidence {
            marker: (*m).to_string(),
            position: token.end() - m.len(),
        })
}

fn all_hits(tokens: &[Token<'_>], markers: &[&str]) -> Vec<Evidence> {
    tokens.iter().filter_map(|t| suffix_match(t, markers)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VerbPosition {
    Initial,
    Medial,
    Final,
}

fn verb_position(order: &str) -> VerbPosition {
    match order.find('V') {
        Some(0) => VerbPosition::Initial,
        Some(2) => VerbPosition::Final,
        _ => VerbPosition::Medial,
    }
}

fn verb_initial_markers(target: &LanguageProfile) -> Vec<&str> {
    let mut markers = target.dimension(DimensionId::Tam).markers.role(MarkerRole::TamMarkers);
    markers.extend(
        target
            .dimension(DimensionId::Agreement)
            .markers
            .role(MarkerRole::AgreementMarkers),
    );
    markers
}

/// Checks that the target profile carries the markers word-order scoring needs.
pub fn check_word_order_markers(target: &LanguageProfile) -> Result<(), ScoreError> {
    let order = target
        .dimension(DimensionId::WordOrder)
        .value
        .as_label()
        .ok_or(ScoreError::NotCategorical)?;
    match verb_position(order) {
        VerbPosition::Final
            if target
                .dimension(DimensionId::WordOrder)
                .markers
                .verb_final_suffixes
                .is_empty() =>
        {
            Err(ScoreError::MissingMarkers {
                dimension: DimensionId::WordOrder,
                role: MarkerRole::VerbFinalSuffixes,
            })
        }
        VerbPosition::Initial if verb_initial_markers(target).is_empty() => Err(ScoreError::MissingMarkers {
            dimension: DimensionId::WordOrder,
            role: MarkerRole::TamMarkers,
        }),
        _ => Ok(()),
    }
}

fn word_order_on(tokens: &[Token<'_>], target: &LanguageProfile) -> Result<DimensionScore, ScoreError> {
    check_word_order_markers(target)?;
    let dim = target.dimension(DimensionId::WordOrder);
    let order = dim.value.as_label().ok_or(ScoreError::NotCategorical)?;
    let hit = match verb_position(order) {
        VerbPosition::Final => {
            let markers = dim.markers.role(MarkerRole::VerbFinalSuffixes);
            tokens.last().and_then(|t| suffix_match(t, &markers))
        }
        VerbPosition::Initial => {
            let markers = verb_initial_markers(target);
            tokens
                .iter()
                .find(|t| t.is_content())
                .and_then(|t| suffix_match(t, &markers))
        }
        VerbPosition::Medial => return Ok(DimensionScore::new(DimensionId::WordOrder, 1.0, vec![])),
    };
    Ok(match hit {
        Some(e) => DimensionScore::new(DimensionId::WordOrder, 1.0, vec![e]),
        None => DimensionScore::new(DimensionId::WordOrder, 0.0, vec![]),
    })
}

fn case_marking_on(tokens: &[Token<'_>], target: &LanguageProfile) -> DimensionScore {
    let dim = target.dimension(DimensionId::CaseMarking);
    let richness = dim.value.as_numeric().unwrap_or(0.0);
    let markers = dim.markers.role(MarkerRole::CaseSuffixes);
    let evidence = all_hits(tokens, &markers);
    let content = tokens.iter().filter(|t| t.is_content()).count();
    let expected = (richness * content as f64).round();
    let score = if expected == 0.0 {
        1.0
    } else {
        (evidence.len() as f64 / expected).min(1.0)
    };
    DimensionScore::new(DimensionId::CaseMarking, score, evidence)
}

fn morphology_on(tokens: &[Token<'_>], target: &LanguageProfile) -> DimensionScore {
    let complexity = target
        .dimension(DimensionId::Morphology)
        .value
        .as_numeric()
        .unwrap_or(0.0);
    let score = if complexity == 0.0 {
        // No agglutination expected, so any length complies.
        1.0
    } else if tokens.is_empty() {
        0.0
    } else {
        let mean = tokens.iter().map(Token::char_len).sum::<usize>() as f64 / tokens.len() as f64;
        ((mean - MORPHOLOGY_MIN_LENGTH) / (MORPHOLOGY_SPAN * complexity)).clamp(0.0, 1.0)
    };
    DimensionScore::new(DimensionId::Morphology, score, vec![])
}

/// Marker roles expected for each presence-scored dimension.
pub fn expected_roles(dimension: DimensionId) -> Option<&'static [MarkerRole]> {
    use MarkerRole::*;
    Some(match dimension {
        DimensionId::Agreement => &[AgreementMarkers, PluralMarkers],
        DimensionId::Tam => &[TamMarkers],
        DimensionId::SerialVerbs => &[SerialVerbMarkers],
        DimensionId::Definiteness => &[DefinitenessMarkers],
        DimensionId::Animacy => &[AnimacyMarkers],
        DimensionId::InfoStructure => &[TopicFocusParticles],
        DimensionId::Negation => &[NegationMarkers],
        DimensionId::ProDrop => &[AgreementMarkers],
        DimensionId::RelativeClauses => &[RelativizerMarkers],
        DimensionId::Copula => &[CopulaForms],
        DimensionId::Honorifics => &[HonorificFormal, HonorificInformal],
        _ => return None,
    })
}

/// Why `dimension` should not be scored for this source, if it should not.
pub fn inapplicability(dimension: DimensionId, target: &LanguageProfile, analysis: &SourceAnalysis) -> Option<String> {
    match dimension {
        DimensionId::WordOrder | DimensionId::CaseMarking | DimensionId::Morphology => return None,
        DimensionId::Negation if !analysis.negated => return Some("source is not negated".into()),
        DimensionId::RelativeClauses if !analysis.has_relative_clause => {
            return Some("source has no relative pronoun".into())
        }
        DimensionId::Honorifics if analysis.register.is_none() => return Some("source has no register cue".into()),
        _ => {}
    }
    let Some(roles) = expected_roles(dimension) else {
        return Some("no surface scorer for this dimension".into());
    };
    let markers = &target.dimension(dimension).markers;
    if roles.iter().all(|r| markers.role(*r).is_empty()) {
        return Some("target profile lists no markers".into());
    }
    None
}

fn honorifics_on(tokens: &[Token<'_>], target: &LanguageProfile, register: Register) -> DimensionScore {
    let markers = &target.dimension(DimensionId::Honorifics).markers;
    let formal = all_hits(tokens, &markers.role(MarkerRole::HonorificFormal));
    let informal = all_hits(tokens, &markers.role(MarkerRole::HonorificInformal));
    let found = match formal.len().cmp(&informal.len()) {
        std::cmp::Ordering::Greater => Some(Register::Formal),
        std::cmp::Ordering::Less => Some(Register::Informal),
        std::cmp::Ordering::Equal => None,
    };
    let mut evidence = formal;
    evidence.extend(informal);
    evidence.sort_by_key(|e| e.position);
    let score = match found {
        None => 0.5,
        Some(r) if r == register => 1.0,
        Some(_) => 0.0,
    };
    DimensionScore::new(DimensionId::Honorifics, score, evidence)
}

fn marker_dimension_on(
    tokens: &[Token<'_>],
    target: &LanguageProfile,
    dimension: DimensionId,
    analysis: &SourceAnalysis,
) -> Result<DimensionOutcome, ScoreError> {
    if expected_roles(dimension).is_none()
        || matches!(
            dimension,
            DimensionId::WordOrder | DimensionId::CaseMarking | DimensionId::Morphology
        )
    {
        return Err(ScoreError::UnsupportedDimension(dimension));
    }
    if let Some(reason) = inapplicability(dimension, target, analysis) {
        return Ok(DimensionOutcome::NotApplicable { dimension, reason });
    }
    if dimension == DimensionId::Honorifics {
        let register = analysis.register.expect("checked by inapplicability");
        return Ok(DimensionOutcome::Scored(honorifics_on(tokens, target, register)));
    }

    let inventory = &target.dimension(dimension).markers;
    let mut expected = 0usize;
    let mut found = 0usize;
    let mut evidence = Vec::new();
    for role in expected_roles(dimension).unwrap_or_default() {
        let markers = inventory.role(*role);
        if markers.is_empty() {
            continue;
        }
        expected += 1;
        let hits = all_hits(tokens, &markers);
        if !hits.is_empty() {
            found += 1;
            evidence.extend(hits);
        }
    }
    evidence.sort_by_key(|e| e.position);
    evidence.dedup();
    Ok(DimensionOutcome::Scored(DimensionScore::new(
        dimension,
        found as f64 / expected as f64,
        evidence,
    )))
}

/// Verb-placement compliance (binary).
pub fn score_word_order(candidate: &Candidate, target: &LanguageProfile) -> Result<DimensionScore, ScoreError> {
    word_order_on(&tokenize_target(&candidate.text)?, target)
}

/// Case-suffix density against the target's case richness.
pub fn score_case_marking(candidate: &Candidate, target: &LanguageProfile) -> Result<DimensionScore, ScoreError> {
    Ok(case_marking_on(&tokenize_target(&candidate.text)?, target))
}

/// Mean token length against the target's morphological complexity.
pub fn score_morphology(candidate: &Candidate, target: &LanguageProfile) -> Result<DimensionScore, ScoreError> {
    Ok(morphology_on(&tokenize_target(&candidate.text)?, target))
}

/// Presence scorer for the remaining marker-based dimensions.
pub fn score_marker_dimension(
    candidate: &Candidate,
    target: &LanguageProfile,
    dimension: DimensionId,
    analysis: &SourceAnalysis,
) -> Result<DimensionOutcome, ScoreError> {
    marker_dimension_on(&tokenize_target(&candidate.text)?, target, dimension, analysis)
}

/// Dimensions to score for one sentence, with their directive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoringPlan {
    pub dimensions: Vec<PlannedDimension>,
    pub skipped: Vec<SkippedDimension>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedDimension {
    pub dimension: DimensionId,
    pub directive: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedDimension {
    pub dimension: DimensionId,
    pub reason: String,
}

impl ScoringPlan {
    /// Active dimensions filtered by source-side applicability.
    pub fn build(
        directive: &DirectiveVector,
        target: &LanguageProfile,
        analysis: &SourceAnalysis,
    ) -> Result<Self, ScoreError> {
        let mut dimensions = Vec::new();
        let mut skipped = Vec::new();
        for &dimension in &directive.active {
            if dimension == DimensionId::WordOrder {
                check_word_order_markers(target)?;
            }
            match inapplicability(dimension, target, analysis) {
                Some(reason) => skipped.push(SkippedDimension { dimension, reason }),
                None => dimensions.push(PlannedDimension {
                    dimension,
                    directive: directive.get(dimension),
                }),
            }
        }
        Ok(ScoringPlan { dimensions, skipped })
    }

    pub fn is_empty(&self) -> bool {
        self.dimensions.iter().all(|d| d.directive <= 0.0)
    }
}

/// Scores one candidate on every planned dimension.
pub fn score_candidate(
    text: &str,
    target: &LanguageProfile,
    plan: &ScoringPlan,
    analysis: &SourceAnalysis,
) -> Result<Vec<DimensionScore>, ScoreError> {
    let tokens = tokenize_target(text)?;
    plan.dimensions
        .iter()
        .map(|p| match p.dimension {
            DimensionId::WordOrder => word_order_on(&tokens, target),
            DimensionId::CaseMarking => Ok(case_marking_on(&tokens, target)),
            DimensionId::Morphology => Ok(morphology_on(&tokens, target)),
            other => match marker_dimension_on(&tokens, target, other, analysis)? {
                DimensionOutcome::Scored(s) => Ok(s),
                DimensionOutcome::NotApplicable { .. } => unreachable!("plan only holds applicable dimensions"),
            },
        })
        .collect()
}

/// Directive-weighted mean of dimension scores over the active dimensions
/// present in `scores`.
pub fn compute_umf_score(scores: &[DimensionScore], directive: &DirectiveVector) -> Result<f64, ScoreError> {
    let weighted: Vec<(f64, f64)> = scores
        .iter()
        .filter(|s| directive.is_active(s.dimension))
        .map(|s| (directive.get(s.dimension), s.score))
        .collect();
    weighted_mean(&weighted)
}

/// Same weighted mean, with weights taken from a scoring plan.
pub fn umf_from_plan(scores: &[DimensionScore], plan: &ScoringPlan) -> Result<f64, ScoreError> {
    let weights: BTreeMap<DimensionId, f64> = plan.dimensions.iter().map(|p| (p.dimension, p.directive)).collect();
    let weighted: Vec<(f64, f64)> = scores
        .iter()
        .filter_map(|s| weights.get(&s.dimension).map(|w| (*w, s.score)))
        .collect();
    weighted_mean(&weighted)
}

fn weighted_mean(pairs: &[(f64, f64)]) -> Result<f64, ScoreError> {
    let total: f64 = pairs.iter().map(|(w, _)| w).sum();
    if total <= 0.0 {
        return Err(ScoreError::NoActiveDimensions);
    }
    let sum: f64 = pairs.iter().map(|(w, s)| w * s).sum();
    Ok((sum / total).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{KeywordAnalyzer, SourceAnalyzer};
    use crate::dimension::PerDimension;
    use crate::directive::LanguagePair;
    use crate::profile::{shipped, Dimension, DimensionValue, MarkerInventory};
    use std::collections::BTreeSet;

    fn cand(text: &str) -> Candidate {
        Candidate::new(text, 0.0, 1)
    }

    fn plain() -> SourceAnalysis {
        KeywordAnalyzer.analyze("The children play in the garden.", None)
    }

    #[test]
    fn verb_final_candidate_complies() {
        let s = score_word_order(&cand("ළමයි උද්‍යානයේ සෙල්ලම් කරනවා"), &shipped::sinhala()).unwrap();
        assert_eq!(s.score, 1.0);
        assert_eq!(s.evidence[0].marker, "වා");
    }

    #[test]
    fn svo_leak_fails_word_order() {
        let s = score_word_order(&cand("දරුවන් සෙල්ලම් උද්‍යානය"), &shipped::sinhala()).unwrap();
        assert_eq!(s.score, 0.0);
        assert!(s.evidence.is_empty());
    }

    #[test]
    fn sov_without_suffixes_is_an_error() {
        let si = shipped::sinhala();
        let bare = si.with_dimension(Dimension::new(
            DimensionId::WordOrder,
            DimensionValue::Categorical("SOV".into()),
        ));
        assert!(matches!(
            score_word_order(&cand("x"), &bare),
            Err(ScoreError::MissingMarkers { .. })
        ));
    }

    #[test]
    fn svo_target_always_complies() {
        let s = score_word_order(&cand("the cat sat"), &shipped::english()).unwrap();
        assert_eq!(s.score, 1.0);
    }

    #[test]
    fn vso_target_checks_first_token() {
        let en = shipped::english();
        let vso = en.with_dimension(Dimension::new(
            DimensionId::WordOrder,
            DimensionValue::Categorical("VSO".into()),
        ));
        assert_eq!(score_word_order(&cand("walked the man"), &vso).unwrap().score, 1.0);
        assert_eq!(score_word_order(&cand("the man walked"), &vso).unwrap().score, 0.0);
    }

    #[test]
    fn locative_suffix_meets_expected_one() {
        // Single content token, richness 0.9: expected round(0.9) = 1.
        let s = score_case_marking(&cand("උද්‍යානයේ"), &shipped::sinhala()).unwrap();
        assert_eq!(s.score, 1.0);
        assert_eq!(s.evidence[0].marker, "ේ");
    }

    #[test]
    fn no_case_suffixes_scores_zero() {
        let s = score_case_marking(&cand("ළමයි සෙල්ලම්"), &shipped::sinhala()).unwrap();
        assert_eq!(s.score, 0.0);
    }

    #[test]
    fn zero_richness_scores_one() {
        let si = shipped::sinhala();
        let flat = si.with_dimension(Dimension::new(DimensionId::CaseMarking, DimensionValue::Numeric(0.0)));
        assert_eq!(score_case_marking(&cand("ළමයි සෙල්ලම්"), &flat).unwrap().score, 1.0);
    }

    #[test]
    fn morphology_ramp() {
        let si = shipped::sinhala();
        // Lengths 5 and 6 -> mean 5.5? Use 5 + 6 + 5 + 6 + 5 = 27 / 5 = 5.4.
        let text = "aaaaa bbbbbb ccccc dddddd eeeee";
        let s = score_morphology(&cand(text), &si).unwrap();
        assert!((s.score - 0.5).abs() < 1e-12, "{}", s.score);
        assert_eq!(score_morphology(&cand("ab abc"), &si).unwrap().score, 0.0);
        assert_eq!(score_morphology(&cand("abcdefghij"), &si).unwrap().score, 1.0);
    }

    #[test]
    fn honorific_register_match() {
        let si = shipped::sinhala();
        let formal = KeywordAnalyzer.analyze("Please sit down, sir.", None);
        let out = score_marker_dimension(&cand("ඔබ ඉඳගන්න"), &si, DimensionId::Honorifics, &formal).unwrap();
        match out {
            DimensionOutcome::Scored(s) => assert_eq!(s.score, 1.0),
            other => panic!("{other:?}"),
        }
        let out = score_marker_dimension(&cand("උඹ ඉඳගනින්"), &si, DimensionId::Honorifics, &formal).unwrap();
        assert!(matches!(out, DimensionOutcome::Scored(s) if s.score == 0.0));
        let out = score_marker_dimension(&cand("ඉඳගන්න"), &si, DimensionId::Honorifics, &formal).unwrap();
        assert!(matches!(out, DimensionOutcome::Scored(s) if s.score == 0.5));
    }

    #[test]
    fn tam_presence() {
        let out =
            score_marker_dimension(&cand("ළමයි සෙල්ලම් කරනවා"), &shipped::sinhala(), DimensionId::Tam, &plain()).unwrap();
        match out {
            DimensionOutcome::Scored(s) => {
                assert_eq!(s.score, 1.0);
                assert!(s.evidence.iter().any(|e| e.marker == "නවා"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negation_skipped_without_negated_source() {
        let out = score_marker_dimension(&cand("නැහැ"), &shipped::sinhala(), DimensionId::Negation, &plain()).unwrap();
        assert!(matches!(out, DimensionOutcome::NotApplicable { .. }));
    }

    #[test]
    fn unsupported_dimensions() {
        for d in [
            DimensionId::Classifiers,
            DimensionId::Evidentiality,
            DimensionId::WordOrder,
        ] {
            assert_eq!(
                score_marker_dimension(&cand("x"), &shipped::sinhala(), d, &plain()),
                Err(ScoreError::UnsupportedDimension(d))
            );
        }
    }

    fn directive_of(entries: &[(DimensionId, f64)]) -> DirectiveVector {
        let mut values = PerDimension::<f64>::default();
        let mut active = BTreeSet::new();
        for (d, v) in entries {
            values[*d] = *v;
            active.insert(*d);
        }
        DirectiveVector {
            values,
            active,
            pair: LanguagePair::new("a", "b"),
        }
    }

    fn score(d: DimensionId, s: f64) -> DimensionScore {
        DimensionScore::new(d, s, vec![])
    }

    #[test]
    fn umf_weighted_average() {
        let dir = directive_of(&[(DimensionId::WordOrder, 0.6), (DimensionId::CaseMarking, 0.4)]);
        let ones = [score(DimensionId::WordOrder, 1.0), score(DimensionId::CaseMarking, 1.0)];
        assert_eq!(compute_umf_score(&ones, &dir).unwrap(), 1.0);
        let zeros = [score(DimensionId::WordOrder, 0.0), score(DimensionId::CaseMarking, 0.0)];
        assert_eq!(compute_umf_score(&zeros, &dir).unwrap(), 0.0);
        let mixed = [score(DimensionId::WordOrder, 1.0), score(DimensionId::CaseMarking, 0.5)];
        assert!((compute_umf_score(&mixed, &dir).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn umf_without_active_scores_fails() {
        let dir = directive_of(&[(DimensionId::WordOrder, 1.0)]);
        assert_eq!(
            compute_umf_score(&[score(DimensionId::Tam, 1.0)], &dir),
            Err(ScoreError::NoActiveDimensions)
        );
    }

    #[test]
    fn plan_for_english_sinhala() {
        let dir = crate::directive::build_directive(
            &shipped::english(),
            &shipped::sinhala(),
            &crate::directive::WeightSet::default(),
            0.1,
        )
        .unwrap();
        let plan = ScoringPlan::build(&dir, &shipped::sinhala(), &plain()).unwrap();
        let skipped: BTreeSet<_> = plan.skipped.iter().map(|s| s.dimension).collect();
        assert_eq!(
            skipped,
            BTreeSet::from([
                DimensionId::Honorifics,
                DimensionId::Negation,
                DimensionId::RelativeClauses
            ])
        );
        assert_eq!(plan.dimensions.len(), 11);
    }

    #[test]
    fn marker_dimension_without_markers_is_not_applicable() {
        let si = shipped::sinhala();
        let bare = si.with_dimension(
            si.dimension(DimensionId::Copula)
                .clone()
                .with_markers(MarkerInventory::default()),
        );
        let out = score_marker_dimension(&cand("x"), &bare, DimensionId::Copula, &plain()).unwrap();
        assert!(matches!(out, DimensionOutcome::NotApplicable { .. }));
    }
}
