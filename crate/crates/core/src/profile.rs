//! Language profiles: the sixteen typological dimensions of one language, with
//! importance weights and surface-marker inventories.
//!
//! Profiles are loaded from a single JSON document per language. Loading
//! validates every invariant; a [`LanguageProfile`] obtained from
//! [`load_profile`] or [`LanguageProfile::from_json_str`] is immutable and
//! known to be valid. Hand-assembled profiles (see
//! [`LanguageProfile::from_dimensions`]) skip validation and can be checked
//! with [`validate_profile`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use unicode_normalization::UnicodeNormalization;

use crate::dimension::{DimensionId, PerDimension};

/// Importance weight used when a profile omits one.
pub fn default_weight(id: DimensionId) -> f64 {
    match id {
        DimensionId::WordOrder => 1.2,
        DimensionId::CaseMarking => 1.0,
        DimensionId::Morphology => 0.8,
        DimensionId::Agreement => 0.6,
        DimensionId::Tam => 0.7,
        DimensionId::Classifiers => 0.8,
        DimensionId::Honorifics => 0.9,
        DimensionId::Evidentiality => 0.8,
        DimensionId::SerialVerbs => 0.7,
        DimensionId::Definiteness => 0.8,
        DimensionId::Animacy => 0.6,
        DimensionId::InfoStructure => 1.0,
        DimensionId::Negation => 0.8,
        DimensionId::ProDrop => 0.7,
        DimensionId::RelativeClauses => 0.6,
        DimensionId::Copula => 0.5,
    }
}

/// Basic constituent orders accepted for `word_order`.
pub const WORD_ORDERS: [&str; 6] = ["SVO", "SOV", "VSO", "VOS", "OVS", "OSV"];

/// Component names a `tam` composite must carry, in order.
pub const TAM_COMPONENTS: [&str; 3] = ["tense", "aspect", "mood"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    Categorical,
    Numeric,
    FeatureSet,
    Composite,
    Boolean,
    BooleanPair,
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ValueKind::Categorical => "categorical",
            ValueKind::Numeric => "numeric",
            ValueKind::FeatureSet => "feature_set",
            ValueKind::Composite => "composite",
            ValueKind::Boolean => "boolean",
            ValueKind::BooleanPair => "boolean_pair",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DimensionValue {
    Categorical(String),
    Numeric(f64),
    FeatureSet(BTreeSet<String>),
    Composite(Vec<Component>),
    Boolean(bool),
    BooleanPair(bool, bool),
}

impl DimensionValue {
    pub fn kind(&self) -> ValueKind {
        match self {
            DimensionValue::Categorical(_) => ValueKind::Categorical,
            DimensionValue::Numeric(_) => ValueKind::Numeric,
            DimensionValue::FeatureSet(_) => ValueKind::FeatureSet,
            DimensionValue::Composite(_) => ValueKind::Composite,
            DimensionValue::Boolean(_) => ValueKind::Boolean,
            DimensionValue::BooleanPair(..) => ValueKind::BooleanPair,
        }
    }

    pub fn as_numeric(&self) -> Option<f64> {
        match self {
            DimensionValue::Numeric(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_label(&self) -> Option<&str> {
        match self {
            DimensionValue::Categorical(s) => Some(s),
            _ => None,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            DimensionValue::Categorical(s) => json!(s),
            DimensionValue::Numeric(v) => json!(v),
            DimensionValue::FeatureSet(set) => json!(set),
            DimensionValue::Composite(parts) => json!(parts),
            DimensionValue::Boolean(b) => json!(b),
            DimensionValue::BooleanPair(a, b) => json!([a, b]),
        }
    }

    fn from_json(kind: ValueKind, value: &Value) -> Result<Self, String> {
        let parsed = match kind {
            ValueKind::Categorical => value
                .as_str()
                .map(|s| DimensionValue::Categorical(s.trim().nfc().collect())),
            ValueKind::Numeric => value.as_f64().map(DimensionValue::Numeric),
            ValueKind::FeatureSet => value.as_array().and_then(|items| {
                items
                    .iter()
                    .map(|v| v.as_str().map(|s| s.trim().nfc().collect::<String>()))
                    .collect::<Option<BTreeSet<_>>>()
                    .map(DimensionValue::FeatureSet)
            }),
            ValueKind::Composite => serde_json::from_value::<Vec<Component>>(value.clone())
                .ok()
                .map(DimensionValue::Composite),
            ValueKind::Boolean => value.as_bool().map(DimensionValue::Boolean),
            ValueKind::BooleanPair => match value.as_array().map(Vec::as_slice) {
                Some([Value::Bool(a), Value::Bool(b)]) => Some(DimensionValue::BooleanPair(*a, *b)),
                _ => None,
            },
        };
        parsed.ok_or_else(|| format!("value does not match kind `{kind}`: {value}"))
    }
}

/// Role of a marker list inside a [`MarkerInventory`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkerRole {
    VerbFinalSuffixes,
    CaseSuffixes,
    PluralMarkers,
    AgreementMarkers,
    TamMarkers,
    HonorificFormal,
    HonorificInformal,
    NegationMarkers,
    RelativizerMarkers,
    CopulaForms,
    TopicFocusParticles,
    DefinitenessMarkers,
    AnimacyMarkers,
    SerialVerbMarkers,
}

/// Surface markers, stored in the target script exactly as matched.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MarkerInventory {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub verb_final_suffixes: Vec<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub case_suffixes: BTreeMap<String, Vec<String>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub plural_markers: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub agreement_markers: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tam_markers: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub honorific_formal: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub honorific_informal: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub negation_markers: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub relativizer_markers: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub copula_forms: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub topic_focus_particles: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub definiteness_markers: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub animacy_markers: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub serial_verb_markers: Vec<String>,
}

impl MarkerInventory {
    /// Markers for one role. Case suffixes are flattened across case names.
    pub fn role(&self, role: MarkerRole) -> Vec<&str> {
        let list = match role {
            MarkerRole::CaseSuffixes => {
                return self.case_suffixes.values().flatten().map(String::as_str).collect();
            }
            MarkerRole::VerbFinalSuffixes => &self.verb_final_suffixes,
            MarkerRole::PluralMarkers => &self.plural_markers,
            MarkerRole::AgreementMarkers => &self.agreement_markers,
            MarkerRole::TamMarkers => &self.tam_markers,
            MarkerRole::HonorificFormal => &self.honorific_formal,
            MarkerRole::HonorificInformal => &self.honorific_informal,
            MarkerRole::NegationMarkers => &self.negation_markers,
            MarkerRole::RelativizerMarkers => &self.relativizer_markers,
            MarkerRole::CopulaForms => &self.copula_forms,
            MarkerRole::TopicFocusParticles => &self.topic_focus_particles,
            MarkerRole::DefinitenessMarkers => &self.definiteness_markers,
            MarkerRole::AnimacyMarkers => &self.animacy_markers,
            MarkerRole::SerialVerbMarkers => &self.serial_verb_markers,
        };
        list.iter().map(String::as_str).collect()
    }

    fn all_strings_mut(&mut self) -> impl Iterator<Item = &mut String> {
        self.verb_final_suffixes
            .iter_mut()
            .chain(self.case_suffixes.values_mut().flatten())
            .chain(self.plural_markers.iter_mut())
            .chain(self.agreement_markers.iter_mut())
            .chain(self.tam_markers.iter_mut())
            .chain(self.honorific_formal.iter_mut())
            .chain(self.honorific_informal.iter_mut())
            .chain(self.negation_markers.iter_mut())
            .chain(self.relativizer_markers.iter_mut())
            .chain(self.copula_forms.iter_mut())
            .chain(self.topic_focus_particles.iter_mut())
            .chain(self.definiteness_markers.iter_mut())
            .chain(self.animacy_markers.iter_mut())
            .chain(self.serial_verb_markers.iter_mut())
    }

    fn all_strings(&self) -> impl Iterator<Item = &String> {
        self.verb_final_suffixes
            .iter()
            .chain(self.case_suffixes.values().flatten())
            .chain(self.plural_markers.iter())
            .chain(self.agreement_markers.iter())
            .chain(self.tam_markers.iter())
            .chain(self.honorific_formal.iter())
            .chain(self.honorific_informal.iter())
            .chain(self.negation_markers.iter())
            .chain(self.relativizer_markers.iter())
            .chain(self.copula_forms.iter())
            .chain(self.topic_focus_particles.iter())
            .chain(self.definiteness_markers.iter())
            .chain(self.animacy_markers.iter())
            .chain(self.serial_verb_markers.iter())
    }

    fn normalize(&mut self) {
        for marker in self.all_strings_mut() {
            *marker = marker.nfc().collect();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dimension {
    pub id: DimensionId,
    pub value: DimensionValue,
    pub weight: f64,
    pub markers: MarkerInventory,
}

impl Dimension {
    /// A dimension with the default weight and no markers.
    pub fn new(id: DimensionId, value: DimensionValue) -> Self {
        Dimension {
            id,
            value,
            weight: default_weight(id),
            markers: MarkerInventory::default(),
        }
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_markers(mut self, markers: MarkerInventory) -> Self {
        self.markers = markers;
        self
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProfileError {
    #[error("cannot read profile {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed profile: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid profile field `{field}`: {reason}")]
    Schema { field: String, reason: String },
}

impl ProfileError {
    fn schema(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ProfileError::Schema {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// One broken invariant found by [`validate_profile`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// `None` for profile-level fields such as the language code.
    pub dimension: Option<DimensionId>,
    pub reason: String,
}

impl Violation {
    fn field(&self) -> String {
        match self.dimension {
            Some(id) => format!("dimensions.{id}"),
            None => "profile".to_string(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field(), self.reason)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageProfile {
    language_code: String,
    language_name: String,
    dimensions: PerDimension<Dimension>,
}

impl LanguageProfile {
    /// Assembles a profile without validation.
    pub fn from_dimensions(
        language_code: impl Into<String>,
        language_name: impl Into<String>,
        dimensions: PerDimension<Dimension>,
    ) -> Self {
        LanguageProfile {
            language_code: language_code.into(),
            language_name: language_name.into(),
            dimensions,
        }
    }

    /// Copy of this profile with one dimension replaced. The result is not
    /// validated.
    pub fn with_dimension(&self, dimension: Dimension) -> Self {
        let mut next = self.clone();
        let id = dimension.id;
        next.dimensions[id] = dimension;
        next
    }

    pub fn language_code(&self) -> &str {
        &self.language_code
    }

    pub fn language_name(&self) -> &str {
        &self.language_name
    }

    pub fn dimension(&self, id: DimensionId) -> &Dimension {
        &self.dimensions[id]
    }

    pub fn dimensions(&self) -> &PerDimension<Dimension> {
        &self.dimensions
    }

    pub fn weights(&self) -> PerDimension<f64> {
        self.dimensions.map(|_, d| d.weight)
    }

    pub fn from_json_str(text: &str) -> Result<Self, ProfileError> {
        let document: Value = serde_json::from_str(text)?;
        let profile = Self::from_json_value(&document)?;
        if let Some(violation) = validate_profile(&profile).into_iter().next() {
            return Err(ProfileError::schema(violation.field(), violation.reason));
        }
        Ok(profile)
    }

    fn from_json_value(document: &Value) -> Result<Self, ProfileError> {
        let top = document
            .as_object()
            .ok_or_else(|| ProfileError::schema("profile", "expected a JSON object"))?;
        reject_unknown_keys(top, &["language_code", "language_name", "dimensions"], "")?;

        let language_code = required_str(top, "language_code")?;
        let language_name = required_str(top, "language_name")?;
        let dims = top
            .get("dimensions")
            .ok_or_else(|| ProfileError::schema("dimensions", "missing"))?
            .as_object()
            .ok_or_else(|| ProfileError::schema("dimensions", "expected an object"))?;

        for key in dims.keys() {
            key.parse::<DimensionId>()
                .map_err(|e| ProfileError::schema(format!("dimensions.{key}"), e.to_string()))?;
        }

        let mut parsed: Vec<Dimension> = Vec::with_capacity(DimensionId::ALL.len());
        for id in DimensionId::ALL {
            let field = format!("dimensions.{id}");
            let raw = dims
                .get(id.as_str())
                .ok_or_else(|| ProfileError::schema(&field, "dimension is missing"))?;
            parsed.push(parse_dimension(id, raw, &field)?);
        }
        let mut parsed = parsed.into_iter();
        let dimensions = PerDimension::from_fn(|_| parsed.next().expect("16 dimensions parsed"));

        Ok(LanguageProfile {
            language_code,
            language_name,
            dimensions,
        })
    }

    pub fn to_json_value(&self) -> Value {
        let mut dims = Map::new();
        for (id, dim) in self.dimensions.iter() {
            dims.insert(
                id.as_str().to_string(),
                json!({
                    "kind": dim.value.kind(),
                    "value": dim.value.to_json(),
                    "weight": dim.weight,
                    "markers": dim.markers,
                }),
            );
        }
        json!({
            "language_code": self.language_code,
            "language_name": self.language_name,
            "dimensions": dims,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("profile serializes")
    }
}

impl Serialize for LanguageProfile {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json_value().serialize(serializer)
    }
}

fn reject_unknown_keys(obj: &Map<String, Value>, allowed: &[&str], prefix: &str) -> Result<(), ProfileError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(extra) => Err(ProfileError::schema(
            format!("{prefix}{extra}"),
            format!("unknown field; expected one of {allowed:?}"),
        )),
        None => Ok(()),
    }
}

fn required_str(obj: &Map<String, Value>, key: &str) -> Result<String, ProfileError> {
    obj.get(key)
        .ok_or_else(|| ProfileError::schema(key, "missing"))?
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| ProfileError::schema(key, "expected a string"))
}

fn parse_dimension(id: DimensionId, raw: &Value, field: &str) -> Result<Dimension, ProfileError> {
    let obj = raw
        .as_object()
        .ok_or_else(|| ProfileError::schema(field, "expected an object"))?;
    reject_unknown_keys(obj, &["kind", "value", "weight", "markers"], &format!("{field}."))?;

    let kind: ValueKind = serde_json::from_value(
        obj.get("kind")
            .cloned()
            .ok_or_else(|| ProfileError::schema(format!("{field}.kind"), "missing"))?,
    )
    .map_err(|e| ProfileError::schema(format!("{field}.kind"), e.to_string()))?;
    let value = obj
        .get("value")
        .ok_or_else(|| ProfileError::schema(format!("{field}.value"), "missing"))
        .and_then(|v| {
            DimensionValue::from_json(kind, v).map_err(|r| ProfileError::schema(format!("{field}.value"), r))
        })?;
    let weight = match obj.get("weight") {
        None | Some(Value::Null) => default_weight(id),
        Some(w) => w
            .as_f64()
            .ok_or_else(|| ProfileError::schema(format!("{field}.weight"), "expected a number"))?,
    };
    let mut markers: MarkerInventory = match obj.get("markers") {
        None | Some(Value::Null) => MarkerInventory::default(),
        Some(m) => serde_json::from_value(m.clone())
            .map_err(|e| ProfileError::schema(format!("{field}.markers"), e.to_string()))?,
    };
    markers.normalize();

    Ok(Dimension {
        id,
        value,
        weight,
        markers,
    })
}

/// Reads, parses and validates a profile file.
pub fn load_profile(path: impl AsRef<Path>) -> Result<LanguageProfile, ProfileError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ProfileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    LanguageProfile::from_json_str(&text)
}

fn in_unit_interval(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

/// Lists every broken invariant; an empty list means the profile is valid.
pub fn validate_profile(profile: &LanguageProfile) -> Vec<Violation> {
    let mut out = Vec::new();
    if profile.language_code.trim().is_empty() {
        out.push(Violation {
            dimension: None,
            reason: "language_code is empty".into(),
        });
    }

    for (id, dim) in profile.dimensions.iter() {
        let mut flag = |reason: String| {
            out.push(Violation {
                dimension: Some(id),
                reason,
            })
        };

        if dim.id != id {
            flag(format!("stored under `{id}` but tagged `{}`", dim.id));
        }
        if !(dim.weight.is_finite() && dim.weight > 0.0) {
            flag(format!("weight must be positive, got {}", dim.weight));
        }

        match &dim.value {
            DimensionValue::Numeric(v) if !in_unit_interval(*v) => {
                flag(format!("numeric value {v} outside [0, 1]"));
            }
            DimensionValue::Composite(parts) => {
                for part in parts {
                    if !in_unit_interval(part.value) {
                        flag(format!("component `{}` value {} outside [0, 1]", part.name, part.value));
                    }
                }
                let names: BTreeSet<&str> = parts.iter().map(|p| p.name.as_str()).collect();
                if names.len() != parts.len() {
                    flag("composite has duplicate component names".into());
                }
            }
            DimensionValue::Categorical(label) if label.is_empty() => {
                flag("categorical label is empty".into());
            }
            _ => {}
        }

        match id {
            DimensionId::WordOrder => match dim.value.as_label() {
                Some(label) if WORD_ORDERS.contains(&label) => {}
                Some(label) => flag(format!("word order `{label}` is not one of {WORD_ORDERS:?}")),
                None => flag(format!("word_order must be categorical, got {}", dim.value.kind())),
            },
            DimensionId::Tam => match &dim.value {
                DimensionValue::Composite(parts) if parts.iter().map(|p| p.name.as_str()).eq(TAM_COMPONENTS) => {}
                DimensionValue::Composite(_) => flag("tam composite must have components tense, aspect, mood".into()),
                other => flag(format!("tam must be composite, got {}", other.kind())),
            },
            DimensionId::CaseMarking | DimensionId::Morphology if dim.value.kind() != ValueKind::Numeric => {
                flag(format!("{id} must be numeric, got {}", dim.value.kind()));
            }
            _ => {}
        }

        if dim.markers.all_strings().any(|m| m.trim().is_empty()) {
            flag("marker strings must be non-empty".into());
        }
    }
    out
}

/// Profiles bundled with the crate.
pub mod shipped {
    use super::LanguageProfile;

    pub const ENGLISH_JSON: &str = include_str!("../data/en.profile.json");
    pub const SINHALA_JSON: &str = include_str!("../data/si.profile.json");

    pub fn english() -> LanguageProfile {
        LanguageProfile::from_json_str(ENGLISH_JSON).expect("shipped English profile is valid")
    }

    pub fn sinhala() -> LanguageProfile {
        LanguageProfile::from_json_str(SINHALA_JSON).expect("shipped Sinhala profile is valid")
    }

    /// Looks up a bundled profile by language code.
    pub fn by_code(code: &str) -> Option<LanguageProfile> {
        match code {
            "en" => Some(english()),
            "si" => Some(sinhala()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_profiles_load_with_reference_values() {
        let en = shipped::english();
        assert_eq!(en.dimension(DimensionId::WordOrder).value.as_label(), Some("SVO"));
        assert_eq!(en.dimension(DimensionId::CaseMarking).value.as_numeric(), Some(0.1));
        let si = shipped::sinhala();
        assert_eq!(si.dimension(DimensionId::WordOrder).value.as_label(), Some("SOV"));
        assert_eq!(si.dimension(DimensionId::CaseMarking).value.as_numeric(), Some(0.9));
    }

    #[test]
    fn shipped_profiles_are_valid() {
        assert_eq!(validate_profile(&shipped::english()), vec![]);
        assert_eq!(validate_profile(&shipped::sinhala()), vec![]);
    }

    #[test]
    fn shipped_weights_are_the_default_set() {
        for profile in [shipped::english(), shipped::sinhala()] {
            for (id, w) in profile.weights().iter() {
                assert_eq!(*w, default_weight(id), "{id}");
            }
        }
    }

    fn without(json: &str, dimension: &str) -> String {
        let mut doc: Value = serde_json::from_str(json).unwrap();
        doc["dimensions"].as_object_mut().unwrap().remove(dimension);
        doc.to_string()
    }

    #[test]
    fn missing_dimension_is_named() {
        let text = without(shipped::ENGLISH_JSON, "evidentiality");
        match LanguageProfile::from_json_str(&text) {
            Err(ProfileError::Schema { field, .. }) => assert_eq!(field, "dimensions.evidentiality"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_dimension_is_rejected() {
        let mut doc: Value = serde_json::from_str(shipped::ENGLISH_JSON).unwrap();
        let copy = doc["dimensions"]["copula"].clone();
        doc["dimensions"]["gender"] = copy;
        match LanguageProfile::from_json_str(&doc.to_string()) {
            Err(ProfileError::Schema { field, .. }) => assert_eq!(field, "dimensions.gender"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_marker_role_is_rejected() {
        let mut doc: Value = serde_json::from_str(shipped::SINHALA_JSON).unwrap();
        doc["dimensions"]["tam"]["markers"]["tam_marker"] = json!(["x"]);
        match LanguageProfile::from_json_str(&doc.to_string()) {
            Err(ProfileError::Schema { field, reason }) => {
                assert_eq!(field, "dimensions.tam.markers");
                assert!(reason.contains("tam_marker"), "{reason}");
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn out_of_range_numeric_is_a_schema_error() {
        let mut doc: Value = serde_json::from_str(shipped::ENGLISH_JSON).unwrap();
        doc["dimensions"]["case_marking"]["value"] = json!(1.3);
        match LanguageProfile::from_json_str(&doc.to_string()) {
            Err(ProfileError::Schema { field, .. }) => assert_eq!(field, "dimensions.case_marking"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(
            LanguageProfile::from_json_str("{\"language_code\": "),
            Err(ProfileError::Parse(_))
        ));
    }

    #[test]
    fn missing_weight_uses_default() {
        let mut doc: Value = serde_json::from_str(shipped::ENGLISH_JSON).unwrap();
        for id in ["word_order", "copula"] {
            doc["dimensions"][id].as_object_mut().unwrap().remove("weight");
        }
        let p = LanguageProfile::from_json_str(&doc.to_string()).unwrap();
        assert_eq!(p.dimension(DimensionId::WordOrder).weight, 1.2);
        assert_eq!(p.dimension(DimensionId::Copula).weight, 0.5);
    }

    #[test]
    fn validate_flags_range_violation() {
        let en = shipped::english();
        let bad = en.with_dimension(Dimension::new(DimensionId::CaseMarking, DimensionValue::Numeric(1.3)));
        let v = validate_profile(&bad);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].dimension, Some(DimensionId::CaseMarking));
    }

    #[test]
    fn validate_flags_zero_weight() {
        let en = shipped::english();
        let morph = en.dimension(DimensionId::Morphology).clone().with_weight(0.0);
        let v = validate_profile(&en.with_dimension(morph));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].dimension, Some(DimensionId::Morphology));
    }

    #[test]
    fn validate_flags_bad_tam_and_word_order() {
        let en = shipped::english();
        let tam = Dimension::new(
            DimensionId::Tam,
            DimensionValue::Composite(vec![Component {
                name: "tense".into(),
                value: 0.5,
            }]),
        );
        let order = Dimension::new(DimensionId::WordOrder, DimensionValue::Categorical("SVX".into()));
        let v = validate_profile(&en.with_dimension(tam).with_dimension(order));
        let dims: Vec<_> = v.iter().map(|x| x.dimension).collect();
        assert_eq!(dims, vec![Some(DimensionId::WordOrder), Some(DimensionId::Tam)]);
    }

    #[test]
    fn validate_flags_blank_marker() {
        let en = shipped::english();
        let markers = MarkerInventory {
            tam_markers: vec!["  ".into()],
            ..Default::default()
        };
        let tam = en.dimension(DimensionId::Tam).clone().with_markers(markers);
        assert_eq!(validate_profile(&en.with_dimension(tam)).len(), 1);
    }

    #[test]
    fn markers_are_nfc_normalized() {
        // U+0DD9 U+0DCA is the canonical decomposition of U+0DDA.
        let mut doc: Value = serde_json::from_str(shipped::SINHALA_JSON).unwrap();
        doc["dimensions"]["tam"]["markers"] = json!({"tam_markers": ["\u{0DD9}\u{0DCA}"]});
        let p = LanguageProfile::from_json_str(&doc.to_string()).unwrap();
        assert_eq!(
            p.dimension(DimensionId::Tam).markers.tam_markers,
            vec!["\u{0DDA}".to_string()]
        );
    }

    #[test]
    fn serialization_round_trips() {
        for p in [shipped::english(), shipped::sinhala()] {
            let again = LanguageProfile::from_json_str(&p.to_json_string()).unwrap();
            assert_eq!(again, p);
        }
    }

    #[test]
    fn repeated_reads_are_identical() {
        let si = shipped::sinhala();
        let a = si.dimension(DimensionId::Agreement).clone();
        let b = si.dimension(DimensionId::Agreement).clone();
        assert_eq!(a, b);
    }
}
