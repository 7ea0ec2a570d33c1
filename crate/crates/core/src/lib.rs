//! Typology-driven reranking of machine translation candidates.

pub mod analysis;
pub mod candidate;
pub mod dimension;
pub mod directive;
pub mod divergence;
pub mod metrics;
pub mod pipeline;
pub mod profile;
pub mod rerank;
pub mod scorers;
pub mod semantic;
pub mod text;

pub use analysis::{KeywordAnalyzer, Register, SourceAnalysis, SourceAnalyzer};
pub use candidate::{Candidate, CandidateError, CandidateSet};
pub use dimension::{DimensionId, PerDimension};
pub use directive::{
    active_dimensions, apply_weights, build_directive, normalize_directive, DirectiveCache, DirectiveError,
    DirectiveVector, LanguagePair, WeightSet, WeightedVector, DEFAULT_ACTIVATION_THRESHOLD,
};
pub use divergence::{compute_divergence_vector, DivergenceError, DivergenceVector};
pub use metrics::{Classification, GainRisk, InterventionLabel, MetricsError, MetricsReport};
pub use profile::{load_profile, validate_profile, Dimension, DimensionValue, LanguageProfile, ProfileError};
pub use rerank::{rerank, RerankConfig, RerankError, RerankRequest, RerankResult, Reranker};
pub use scorers::{compute_umf_score, score_candidate, DimensionOutcome, DimensionScore, ScoreError, ScoringPlan};
pub use semantic::{BiasMap, SenseLexicon, SenseResolution};
