//! Structural divergence between a source and a target profile.
//!
//! Profile fractions are quantized to nine decimal places and combined in
//! integer arithmetic. Each result is produced by a single correctly rounded
//! division, so a divergence of 0.6 is the same `f64` as the literal `0.6`.

use std::collections::BTreeSet;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::dimension::{DimensionId, PerDimension};
use crate::profile::{Component, DimensionValue, LanguageProfile, ValueKind, WORD_ORDERS};

const SCALE: i128 = 1_000_000_000;

/// Sub-component weights for (tense, aspect, mood).
pub const TAM_WEIGHTS: [f64; 3] = [0.4, 0.4, 0.2];

/// Word-order change that keeps the object on the same side of the verb.
pub const VERB_POSITION_CHANGE: f64 = 0.6;
/// Word-order change that moves the object across the verb.
pub const MAJOR_SWAP: f64 = 1.0;
/// Fallback for categorical label pairs missing from the lookup table.
pub const UNLISTED_CATEGORICAL: f64 = 0.5;

/// Symmetric divergence table for non-word-order categorical dimensions.
/// Labels compare case-insensitively.
const CATEGORICAL_TABLE: &[(DimensionId, &str, &str, f64)] = &[
    (DimensionId::Definiteness, "articles", "demonstratives", 0.3),
    (DimensionId::Definiteness, "articles", "none", 0.6),
    (DimensionId::Definiteness, "demonstratives", "none", 0.3),
    (DimensionId::Negation, "particle", "suffix+particle", 0.4),
    (DimensionId::Negation, "particle", "suffix", 0.6),
    (DimensionId::Negation, "suffix", "suffix+particle", 0.4),
    (DimensionId::RelativeClauses, "postnominal", "prenominal", 0.4),
    (DimensionId::RelativeClauses, "postnominal", "internally headed", 0.6),
    (DimensionId::RelativeClauses, "prenominal", "internally headed", 0.6),
    (DimensionId::Copula, "explicit", "often omitted", 0.4),
    (DimensionId::Copula, "explicit", "absent", 0.8),
    (DimensionId::Copula, "often omitted", "absent", 0.4),
];

/// Divergence for a differing boolean flag. For flag pairs, each differing
/// flag contributes this amount.
pub fn boolean_magnitude(dimension: DimensionId) -> f64 {
    match dimension {
        DimensionId::Animacy => 0.4,
        DimensionId::ProDrop => 0.5,
        DimensionId::InfoStructure => 0.4,
        _ => 0.5,
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DivergenceError {
    #[error("unknown label `{label}` for {dimension}")]
    UnknownLabel { dimension: DimensionId, label: String },
    #[error("value {0} outside [0, 1]")]
    Range(f64),
    #[error("composite mismatch: {0}")]
    ComponentMismatch(String),
    #[error("{dimension}: source is {source_kind} but target is {target_kind}")]
    KindMismatch {
        dimension: DimensionId,
        source_kind: ValueKind,
        target_kind: ValueKind,
    },
}

/// Sixteen divergence values in [0, 1], one per dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DivergenceVector(pub PerDimension<f64>);

impl DivergenceVector {
    pub fn get(&self, id: DimensionId) -> f64 {
        self.0[id]
    }

    pub fn values(&self) -> &PerDimension<f64> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.values().iter().all(|v| *v == 0.0)
    }
}

fn to_units(x: f64) -> i128 {
    (x * SCALE as f64).round() as i128
}

fn exact_ratio(num: i128, den: i128) -> f64 {
    if num == 0 {
        return 0.0;
    }
    let g = num.gcd(&den);
    (num / g) as f64 / (den / g) as f64
}

fn check_fraction(x: f64) -> Result<(), DivergenceError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(DivergenceError::Range(x))
    }
}

fn object_before_verb(order: &str) -> bool {
    order.find('O') < order.find('V')
}

/// Divergence between two categorical labels of one dimension.
pub fn categorical_divergence(dimension: DimensionId, src: &str, tgt: &str) -> Result<f64, DivergenceError> {
    if dimension == DimensionId::WordOrder {
        for label in [src, tgt] {
            if !WORD_ORDERS.contains(&label) {
                return Err(DivergenceError::UnknownLabel {
                    dimension,
                    label: label.to_string(),
                });
            }
        }
        return Ok(if src == tgt {
            0.0
        } else if object_before_verb(src) == object_before_verb(tgt) {
            VERB_POSITION_CHANGE
        } else {
            MAJOR_SWAP
        });
    }

    let a = src.trim().to_lowercase();
    let b = tgt.trim().to_lowercase();
    if a == b {
        return Ok(0.0);
    }
    let listed = CATEGORICAL_TABLE
        .iter()
        .find(|(d, x, y, _)| *d == dimension && ((*x == a && *y == b) || (*x == b && *y == a)));
    match listed {
        Some((.., value)) => Ok(*value),
        None => {
            log::warn!("{dimension}: no divergence listed for `{src}` vs `{tgt}`, using {UNLISTED_CATEGORICAL}");
            Ok(UNLISTED_CATEGORICAL)
        }
    }
}

/// Absolute difference of two fractions.
pub fn numeric_divergence(src: f64, tgt: f64) -> Result<f64, DivergenceError> {
    check_fraction(src)?;
    check_fraction(tgt)?;
    Ok(exact_ratio((to_units(src) - to_units(tgt)).abs(), SCALE))
}

/// Jaccard distance; two empty sets are at distance 0.
pub fn set_divergence(src: &BTreeSet<String>, tgt: &BTreeSet<String>) -> f64 {
    let union = src.union(tgt).count() as i128;
    if union == 0 {
        return 0.0;
    }
    let shared = src.intersection(tgt).count() as i128;
    exact_ratio(union - shared, union)
}

/// Weighted sum of absolute component differences. Weights must sum to 1.
pub fn composite_divergence(src: &[Component], tgt: &[Component], weights: &[f64]) -> Result<f64, DivergenceError> {
    if src.len() != tgt.len() || src.len() != weights.len() {
        return Err(DivergenceError::ComponentMismatch(format!(
            "{} source components, {} target components, {} weights",
            src.len(),
            tgt.len(),
            weights.len()
        )));
    }
    let weight_units: Vec<i128> = weights.iter().map(|w| to_units(*w)).collect();
    if weight_units.iter().any(|w| *w < 0) || weight_units.iter().sum::<i128>() != SCALE {
        return Err(DivergenceError::ComponentMismatch(format!(
            "component weights {weights:?} do not sum to 1"
        )));
    }
    let mut total = 0i128;
    for ((s, t), w) in src.iter().zip(tgt).zip(&weight_units) {
        if s.name != t.name {
            return Err(DivergenceError::ComponentMismatch(format!(
                "component `{}` vs `{}`",
                s.name, t.name
            )));
        }
        check_fraction(s.value)?;
        check_fraction(t.value)?;
        total += w * (to_units(s.value) - to_units(t.value)).abs();
    }
    Ok(exact_ratio(total, SCALE * SCALE))
}

fn equal_weight_composite(src: &[Component], tgt: &[Component]) -> Result<f64, DivergenceError> {
    if src.len() != tgt.len() || src.is_empty() {
        return Err(DivergenceError::ComponentMismatch(format!(
            "{} source components vs {} target components",
            src.len(),
            tgt.len()
        )));
    }
    let mut total = 0i128;
    for (s, t) in src.iter().zip(tgt) {
        if s.name != t.name {
            return Err(DivergenceError::ComponentMismatch(format!(
                "component `{}` vs `{}`",
                s.name, t.name
            )));
        }
        total += (to_units(s.value) - to_units(t.value)).abs();
    }
    Ok(exact_ratio(total, SCALE * src.len() as i128))
}

fn flag_divergence(dimension: DimensionId, differing: usize) -> f64 {
    let units = to_units(boolean_magnitude(dimension)) * differing as i128;
    exact_ratio(units.min(SCALE), SCALE)
}

fn dimension_divergence(
    dimension: DimensionId,
    src: &DimensionValue,
    tgt: &DimensionValue,
) -> Result<f64, DivergenceError> {
    use DimensionValue::*;
    match (src, tgt) {
        (Categorical(a), Categorical(b)) => categorical_divergence(dimension, a, b),
        (Numeric(a), Numeric(b)) => numeric_divergence(*a, *b),
        (FeatureSet(a), FeatureSet(b)) => Ok(set_divergence(a, b)),
        (Composite(a), Composite(b)) if dimension == DimensionId::Tam => composite_divergence(a, b, &TAM_WEIGHTS),
        (Composite(a), Composite(b)) => equal_weight_composite(a, b),
        (Boolean(a), Boolean(b)) => Ok(flag_divergence(dimension, usize::from(a != b))),
        (BooleanPair(a1, a2), BooleanPair(b1, b2)) => Ok(flag_divergence(
            dimension,
            usize::from(a1 != b1) + usize::from(a2 != b2),
        )),
        _ => Err(DivergenceError::KindMismatch {
            dimension,
            source_kind: src.kind(),
            target_kind: tgt.kind(),
        }),
    }
}

/// Divergence on all sixteen dimensions.
pub fn compute_divergence_vector(
    src: &LanguageProfile,
    tgt: &LanguageProfile,
) -> Result<DivergenceVector, DivergenceError> {
    let mut values = PerDimension::<f64>::default();
    for id in DimensionId::ALL {
        values[id] = dimension_divergence(id, &src.dimension(id).value, &tgt.dimension(id).value)?;
    }
    Ok(DivergenceVector(values))
}
