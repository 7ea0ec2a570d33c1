//! The sixteen typological dimensions and a fixed-order per-dimension container.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Number of typological dimensions tracked by every profile and vector.
pub const DIMENSION_COUNT: usize = 16;

/// One typological dimension. Declaration order is the canonical vector order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionId {
    WordOrder,
    CaseMarking,
    Morphology,
    Agreement,
    Tam,
    Classifiers,
    Honorifics,
    Evidentiality,
    SerialVerbs,
    Definiteness,
    Animacy,
    InfoStructure,
    Negation,
    ProDrop,
    RelativeClauses,
    Copula,
}

impl DimensionId {
    pub const ALL: [DimensionId; DIMENSION_COUNT] = [
        DimensionId::WordOrder,
        DimensionId::CaseMarking,
        DimensionId::Morphology,
        DimensionId::Agreement,
        DimensionId::Tam,
        DimensionId::Classifiers,
        DimensionId::Honorifics,
        DimensionId::Evidentiality,
        DimensionId::SerialVerbs,
        DimensionId::Definiteness,
        DimensionId::Animacy,
        DimensionId::InfoStructure,
        DimensionId::Negation,
        DimensionId::ProDrop,
        DimensionId::RelativeClauses,
        DimensionId::Copula,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DimensionId::WordOrder => "word_order",
            DimensionId::CaseMarking => "case_marking",
            DimensionId::Morphology => "morphology",
            DimensionId::Agreement => "agreement",
            DimensionId::Tam => "tam",
            DimensionId::Classifiers => "classifiers",
            DimensionId::Honorifics => "honorifics",
            DimensionId::Evidentiality => "evidentiality",
            DimensionId::SerialVerbs => "serial_verbs",
            DimensionId::Definiteness => "definiteness",
            DimensionId::Animacy => "animacy",
            DimensionId::InfoStructure => "info_structure",
            DimensionId::Negation => "negation",
            DimensionId::ProDrop => "pro_drop",
            DimensionId::RelativeClauses => "relative_clauses",
            DimensionId::Copula => "copula",
        }
    }
}

impl fmt::Display for DimensionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown dimension id `{0}`")]
pub struct UnknownDimension(pub String);

impl FromStr for DimensionId {
    type Err = UnknownDimension;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DimensionId::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| UnknownDimension(s.to_string()))
    }
}

/// A value for each of the sixteen dimensions, stored in canonical order.
///
/// Serializes as a JSON object keyed by dimension id. Deserialization requires
/// every key exactly once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerDimension<T>(pub [T; DIMENSION_COUNT]);

impl<T> PerDimension<T> {
    pub fn from_fn(mut f: impl FnMut(DimensionId) -> T) -> Self {
        PerDimension(std::array::from_fn(|i| f(DimensionId::ALL[i])))
    }

    pub fn iter(&self) -> impl Iterator<Item = (DimensionId, &T)> {
        DimensionId::ALL.into_iter().zip(self.0.iter())
    }

    pub fn map<U>(&self, mut f: impl FnMut(DimensionId, &T) -> U) -> PerDimension<U> {
        PerDimension::from_fn(|d| f(d, &self.0[d.index()]))
    }

    pub fn values(&self) -> &[T; DIMENSION_COUNT] {
        &self.0
    }
}

impl<T: Default> Default for PerDimension<T> {
    fn default() -> Self {
        PerDimension::from_fn(|_| T::default())
    }
}

impl<T> Index<DimensionId> for PerDimension<T> {
    type Output = T;

    fn index(&self, id: DimensionId) -> &T {
        &self.0[id.index()]
    }
}

impl<T> IndexMut<DimensionId> for PerDimension<T> {
    fn index_mut(&mut self, id: DimensionId) -> &mut T {
        &mut self.0[id.index()]
    }
}

impl PerDimension<f64> {
    pub fn l2_norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl<T: Serialize> Serialize for PerDimension<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(DIMENSION_COUNT))?;
        for (id, value) in self.iter() {
            map.serialize_entry(id.as_str(), value)?;
        }
        map.end()
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for PerDimension<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PerDimensionVisitor<T>(std::marker::PhantomData<T>);

        impl<'de, T: Deserialize<'de>> Visitor<'de> for PerDimensionVisitor<T> {
            type Value = PerDimension<T>;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object keyed by all 16 dimension ids")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut slots: [Option<T>; DIMENSION_COUNT] = std::array::from_fn(|_| None);
                while let Some(key) = access.next_key::<String>()? {
                    let id = key.parse::<DimensionId>().map_err(de::Error::custom)?;
                    if slots[id.index()].is_some() {
                        return Err(de::Error::custom(format!("duplicate dimension `{id}`")));
                    }
                    slots[id.index()] = Some(access.next_value()?);
                }
                if let Some(missing) = DimensionId::ALL.iter().find(|d| slots[d.index()].is_none()) {
                    return Err(de::Error::custom(format!("missing dimension `{missing}`")));
                }
                Ok(PerDimension(slots.map(|s| s.expect("checked above"))))
            }
        }

        deserializer.deserialize_map(PerDimensionVisitor(std::marker::PhantomData))
    }
}
