//! Mixing model confidence with typological compliance and picking the winner.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::analysis::{KeywordAnalyzer, SourceAnalyzer};
use crate::candidate::{check_candidates, Candidate, CandidateError};
use crate::directive::{DirectiveCache, DirectiveError, WeightSet, DEFAULT_ACTIVATION_THRESHOLD};
use crate::profile::LanguageProfile;
use crate::scorers::{score_candidate, umf_from_plan, DimensionScore, ScoreError, ScoringPlan};
use crate::semantic::{
    build_bias_map, resolve_all, score_sense_compliance, BiasMap, SenseLexicon, SenseResolution, DEFAULT_BOOST,
    DEFAULT_PENALTY,
};

/// Final scores closer than this are ties.
pub const TIE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelScoreMode {
    /// Min-max normalization over the scored candidates.
    #[default]
    MinMax,
    /// Raw generator scores, unnormalized. For comparison runs only.
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RerankConfig {
    pub alpha: f64,
    pub activation_threshold: f64,
    pub top_k: usize,
    pub beam_width: usize,
    pub boost: f64,
    /// Magnitude of the penalty; applied as a negative adjustment.
    pub penalty: f64,
    /// Score every candidate instead of only the top `top_k`.
    pub score_all: bool,
    pub model_scores: ModelScoreMode,
}

impl Default for RerankConfig {
    fn default() -> Self {
        RerankConfig {
            alpha: 0.5,
            activation_threshold: DEFAULT_ACTIVATION_THRESHOLD,
            top_k: 4,
            beam_width: 32,
            boost: DEFAULT_BOOST,
            penalty: DEFAULT_PENALTY,
            score_all: false,
            model_scores: ModelScoreMode::MinMax,
        }
    }
}

impl RerankConfig {
    pub fn validate(&self) -> Result<(), RerankError> {
        let bad = |msg: String| Err(RerankError::InvalidConfig(msg));
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad(format!("alpha {} outside [0, 1]", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.activation_threshold) {
            return bad(format!(
                "activation threshold {} outside [0, 1]",
                self.activation_threshold
            ));
        }
        if self.top_k < 1 || self.top_k > self.beam_width {
            return bad(format!(
                "need 1 <= top_k ({}) <= beam_width ({})",
                self.top_k, self.beam_width
            ));
        }
        if self.boost.is_nan() || self.boost <= 0.0 || self.penalty.is_nan() || self.penalty < 0.0 {
            return bad(format!(
                "boost must be > 0 and penalty >= 0, got {} / {}",
                self.boost, self.penalty
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RerankError {
    #[error("no candidates to normalize")]
    EmptySet,
    #[error(transparent)]
    Candidates(#[from] CandidateError),
    #[error("no candidate has original rank 1")]
    MissingBaseline,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("score {0} outside [0, 1]")]
    Range(f64),
    #[error(transparent)]
    Directive(#[from] DirectiveError),
    #[error(transparent)]
    Score(#[from] ScoreError),
}

/// Min-max normalization of model scores, aligned with the input order.
/// One candidate, or all-equal scores, map to 1.0.
pub fn normalize_model_scores(candidates: &[Candidate]) -> Result<Vec<f64>, RerankError> {
    if candidates.is_empty() {
        return Err(RerankError::EmptySet);
    }
    let raw: Vec<f64> = candidates.iter().map(Candidate::effective_model_score).collect();
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    Ok(raw
        .iter()
        .map(|s| if span > 0.0 { (s - lo) / span } else { 1.0 })
        .collect())
}

/// `alpha * model + (1 - alpha) * umf`.
pub fn final_score(model: f64, umf: f64, alpha: f64) -> Result<f64, RerankError> {
    for v in [model, umf, alpha] {
        if !(0.0..=1.0).contains(&v) {
            return Err(RerankError::Range(v));
        }
    }
    Ok(alpha * model + (1.0 - alpha) * umf)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateTrace {
    pub candidate: Candidate,
    pub normalized_model_score: f64,
    pub umf_score: f64,
    pub sense_compliance: f64,
    pub final_score: f64,
    pub dimension_scores: Vec<DimensionScore>,
}

/// Where the candidates came from and whether the bias map reached the generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub honored_bias: bool,
    #[serde(default, skip_serializing_if = "BiasMap::is_empty")]
    pub bias: BiasMap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RerankResult {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentence_id: Option<String>,
    pub source_text: String,
    pub chosen: Candidate,
    pub baseline: Candidate,
    pub changed: bool,
    pub alpha: f64,
    /// Set when reranking was skipped and the baseline returned as is.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skip_reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<ScoringPlan>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub resolutions: Vec<SenseResolution>,
    #[serde(default)]
    pub per_candidate: Vec<CandidateTrace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl RerankResult {
    /// UMF score of the chosen candidate, if it was scored.
    pub fn chosen_umf(&self) -> Option<f64> {
        self.per_candidate
            .iter()
            .find(|t| t.candidate.original_rank == self.chosen.original_rank)
            .map(|t| t.umf_score)
    }
}

/// Index of the highest final score; ties go to the lower original rank.
fn select(traces: &[CandidateTrace]) -> usize {
    let mut order: Vec<usize> = (0..traces.len()).collect();
    order.sort_by_key(|i| traces[*i].candidate.original_rank);
    let mut best = order[0];
    for &i in &order[1..] {
        if traces[i].final_score > traces[best].final_score + TIE_EPSILON {
            best = i;
        }
    }
    best
}

/// One source sentence to rerank.
#[derive(Debug, Clone, Copy)]
pub struct RerankRequest<'a> {
    pub sentence_id: Option<&'a str>,
    pub source_text: &'a str,
    pub formal: Option<bool>,
    pub candidates: &'a [Candidate],
}

/// Reranks candidates for a fixed source/target profile pair.
pub struct Reranker<'a> {
    source: &'a LanguageProfile,
    target: &'a LanguageProfile,
    lexicon: &'a SenseLexicon,
    config: RerankConfig,
    cache: Arc<DirectiveCache>,
    analyzer: Arc<dyn SourceAnalyzer>,
}

impl<'a> Reranker<'a> {
    pub fn new(
        source: &'a LanguageProfile,
        target: &'a LanguageProfile,
        lexicon: &'a SenseLexicon,
        config: RerankConfig,
    ) -> Result<Self, RerankError> {
        config.validate()?;
        let cache = Arc::new(DirectiveCache::new(None, config.activation_threshold));
        Ok(Reranker {
            source,
            target,
            lexicon,
            config,
            cache,
            analyzer: Arc::new(KeywordAnalyzer),
        })
    }

    /// Uses a fixed weight set instead of the target profile's weights.
    pub fn with_weights(mut self, weights: WeightSet) -> Self {
        self.cache = Arc::new(DirectiveCache::new(Some(weights), self.config.activation_threshold));
        self
    }

    pub fn with_cache(mut self, cache: Arc<DirectiveCache>) -> Self {
        self.cache = cache;
        self
    }

    pub fn with_analyzer(mut self, analyzer: Arc<dyn SourceAnalyzer>) -> Self {
        self.analyzer = analyzer;
        self
    }

    pub fn config(&self) -> &RerankConfig {
        &self.config
    }

    /// Confident-sense bias map for a source sentence.
    pub fn bias_for(&self, source_text: &str) -> BiasMap {
        let resolutions = resolve_all(source_text, self.lexicon);
        build_bias_map(&resolutions, self.lexicon, self.config.boost, self.config.penalty)
    }

    pub fn rerank(&self, request: RerankRequest<'_>) -> Result<RerankResult, RerankError> {
        check_candidates(request.candidates)?;
        let baseline = request
            .candidates
            .iter()
            .find(|c| c.original_rank == 1)
            .cloned()
            .ok_or(RerankError::MissingBaseline)?;

        let mut retained = request.candidates.to_vec();
        retained.sort_by_key(|c| c.original_rank);
        if !self.config.score_all {
            retained.truncate(self.config.top_k);
        }

        let skipped = |reason: String, plan: Option<ScoringPlan>| RerankResult {
            sentence_id: request.sentence_id.map(str::to_string),
            source_text: request.source_text.to_string(),
            chosen: baseline.clone(),
            baseline: baseline.clone(),
            changed: false,
            alpha: self.config.alpha,
            skip_reason: Some(reason),
            plan,
            resolutions: Vec::new(),
            per_candidate: Vec::new(),
            provenance: None,
        };

        let directive = match self.cache.get(self.source, self.target) {
            Ok(d) => d,
            Err(DirectiveError::ZeroVector) => return Ok(skipped(DirectiveError::ZeroVector.to_string(), None)),
            Err(e) => return Err(e.into()),
        };
        let analysis = self.analyzer.analyze(request.source_text, request.formal);
        let plan = ScoringPlan::build(&directive, self.target, &analysis)?;
        if plan.is_empty() {
            return Ok(skipped(ScoreError::NoActiveDimensions.to_string(), Some(plan)));
        }
        let resolutions = resolve_all(request.source_text, self.lexicon);

        let model = match self.config.model_scores {
            ModelScoreMode::MinMax => normalize_model_scores(&retained)?,
            ModelScoreMode::Raw => retained.iter().map(Candidate::effective_model_score).collect(),
        };
        let alpha = self.config.alpha;
        let mut traces = Vec::with_capacity(retained.len());
        for (candidate, model_score) in retained.into_iter().zip(model) {
            let dimension_scores = score_candidate(&candidate.text, self.target, &plan, &analysis)?;
            let umf_score = umf_from_plan(&dimension_scores, &plan)?;
            let sense_compliance = score_sense_compliance(&candidate.text, &resolutions, self.lexicon);
            let gated = umf_score * sense_compliance;
            let final_score = match self.config.model_scores {
                ModelScoreMode::MinMax => final_score(model_score, gated, alpha)?,
                ModelScoreMode::Raw => alpha * model_score + (1.0 - alpha) * gated,
            };
            traces.push(CandidateTrace {
                candidate,
                normalized_model_score: model_score,
                umf_score,
                sense_compliance,
                final_score,
                dimension_scores,
            });
        }

        let chosen = traces[select(&traces)].candidate.clone();
        Ok(RerankResult {
            sentence_id: request.sentence_id.map(str::to_string),
            source_text: request.source_text.to_string(),
            changed: chosen.original_rank != baseline.original_rank,
            chosen,
            baseline,
            alpha,
            skip_reason: None,
            plan: Some(plan),
            resolutions,
            per_candidate: traces,
            provenance: None,
        })
    }
}

/// Reranks one sentence with the default analyzer and a fresh directive cache.
pub fn rerank(
    source_text: &str,
    candidates: &[Candidate],
    src_profile: &LanguageProfile,
    tgt_profile: &LanguageProfile,
    lexicon: &SenseLexicon,
    config: &RerankConfig,
) -> Result<RerankResult, RerankError> {
    Reranker::new(src_profile, tgt_profile, lexicon, config.clone())?.rerank(RerankRequest {
        sentence_id: None,
        source_text,
        formal: None,
        candidates,
    })
}
