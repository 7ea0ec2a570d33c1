//! Weighted, L2-normalized directive vectors and dimension activation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::dimension::{DimensionId, PerDimension};
use crate::divergence::{compute_divergence_vector, DivergenceError, DivergenceVector};
use crate::profile::{default_weight, LanguageProfile};

pub const DEFAULT_ACTIVATION_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DirectiveError {
    #[error("weight for {dimension} must be positive, got {weight}")]
    NonPositiveWeight { dimension: DimensionId, weight: f64 },
    #[error("all weighted divergences are zero; source and target are typologically identical")]
    ZeroVector,
    #[error("activation threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),
    #[error(transparent)]
    Divergence(#[from] DivergenceError),
    #[error("weight file: {0}")]
    WeightFile(String),
}

/// Per-dimension importance weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightSet(pub PerDimension<f64>);

impl Default for WeightSet {
    fn default() -> Self {
        WeightSet(PerDimension::from_fn(default_weight))
    }
}

impl WeightSet {
    pub fn from_profile(profile: &LanguageProfile) -> Self {
        WeightSet(profile.weights())
    }

    /// Replaces the listed dimensions, keeping the rest.
    pub fn with_overrides(mut self, overrides: &BTreeMap<DimensionId, f64>) -> Self {
        for (id, w) in overrides {
            self.0[*id] = *w;
        }
        self
    }

    pub fn scaled(&self, factor: f64) -> Self {
        WeightSet(self.0.map(|_, w| w * factor))
    }
}

/// Reads a weight-override file: a JSON object mapping dimension ids to weights.
/// Dimensions may be omitted.
pub fn load_weight_overrides(path: impl AsRef<Path>) -> Result<BTreeMap<DimensionId, f64>, DirectiveError> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| DirectiveError::WeightFile(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| DirectiveError::WeightFile(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedVector(pub PerDimension<f64>);

impl WeightedVector {
    pub fn norm(&self) -> f64 {
        self.0.l2_norm()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LanguagePair {
    pub source: String,
    pub target: String,
}

impl LanguagePair {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        LanguagePair {
            source: source.into(),
            target: target.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectiveVector {
    pub values: PerDimension<f64>,
    pub active: BTreeSet<DimensionId>,
    pub pair: LanguagePair,
}

impl DirectiveVector {
    pub fn get(&self, id: DimensionId) -> f64 {
        self.values[id]
    }

    pub fn is_active(&self, id: DimensionId) -> bool {
        self.active.contains(&id)
    }

    /// Recomputes the active set from raw divergence.
    pub fn with_activation(mut self, divergence: &DivergenceVector, threshold: f64) -> Result<Self, DirectiveError> {
        self.active = active_dimensions(divergence, threshold)?;
        Ok(self)
    }
}

/// Entry-wise product of divergence and weight.
pub fn apply_weights(divergence: &DivergenceVector, weights: &WeightSet) -> Result<WeightedVector, DirectiveError> {
    for (dimension, &weight) in weights.0.iter() {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(DirectiveError::NonPositiveWeight { dimension, weight });
        }
    }
    Ok(WeightedVector(divergence.values().map(|id, d| d * weights.0[id])))
}

/// Divides by the Euclidean norm. The active set starts as every non-zero
/// entry; use [`DirectiveVector::with_activation`] to apply a threshold.
pub fn normalize_directive(weighted: &WeightedVector, pair: LanguagePair) -> Result<DirectiveVector, DirectiveError> {
    let norm = weighted.norm();
    if norm == 0.0 {
        return Err(DirectiveError::ZeroVector);
    }
    let values = weighted.0.map(|_, w| w / norm);
    let active = values.iter().filter(|(_, v)| **v > 0.0).map(|(id, _)| id).collect();
    Ok(DirectiveVector { values, active, pair })
}

/// Dimensions whose raw divergence reaches the threshold.
pub fn active_dimensions(
    divergence: &DivergenceVector,
    threshold: f64,
) -> Result<BTreeSet<DimensionId>, DirectiveError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(DirectiveError::InvalidThreshold(threshold));
    }
    Ok(divergence
        .values()
        .iter()
        .filter(|(_, d)| **d >= threshold)
        .map(|(id, _)| id)
        .collect())
}

/// Full path from two profiles to an activated directive vector.
pub fn build_directive(
    src: &LanguageProfile,
    tgt: &LanguageProfile,
    weights: &WeightSet,
    threshold: f64,
) -> Result<DirectiveVector, DirectiveError> {
    let divergence = compute_divergence_vector(src, tgt)?;
    let weighted = apply_weights(&divergence, weights)?;
    let pair = LanguagePair::new(src.language_code(), tgt.language_code());
    normalize_directive(&weighted, pair)?.with_activation(&divergence, threshold)
}

type CacheSlot = Arc<OnceLock<Result<Arc<DirectiveVector>, DirectiveError>>>;

/// Directive vectors computed once per language pair.
///
/// Uses the target profile's weights unless an explicit weight set is given.
/// Concurrent lookups of the same pair compute it once.
#[derive(Debug, Default)]
pub struct DirectiveCache {
    weights: Option<WeightSet>,
    threshold: f64,
    slots: Mutex<HashMap<LanguagePair, CacheSlot>>,
}

impl DirectiveCache {
    pub fn new(weights: Option<WeightSet>, threshold: f64) -> Self {
        DirectiveCache {
            weights,
            threshold,
            slots: Mutex::new(HashMap::new()),
        }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn get(&self, src: &LanguageProfile, tgt: &LanguageProfile) -> Result<Arc<DirectiveVector>, DirectiveError> {
        let key = LanguagePair::new(src.language_code(), tgt.language_code());
        let slot = {
            let mut slots = self.slots.lock().expect("directive cache poisoned");
            Arc::clone(slots.entry(key).or_default())
        };
        slot.get_or_init(|| {
            let weights = self.weights.unwrap_or_else(|| WeightSet::from_profile(tgt));
            build_directive(src, tgt, &weights, self.threshold).map(Arc::new)
        })
        .clone()
    }
}
