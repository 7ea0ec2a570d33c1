use std::collections::BTreeSet;

use proptest::prelude::*;
use umf_core::directive::{apply_weights, normalize_directive, LanguagePair, WeightSet};
use umf_core::divergence::{categorical_divergence, composite_divergence, numeric_divergence, set_divergence};
use umf_core::profile::{shipped, Component, Dimension, DimensionValue, LanguageProfile, WORD_ORDERS};
use umf_core::{compute_divergence_vector, DimensionId, DivergenceVector, PerDimension};

const CASES: u32 = 10_000;

const FEATURES: [&str; 6] = ["person", "number", "gender", "animacy", "case", "honorific"];

fn labels(id: DimensionId) -> &'static [&'static str] {
    match id {
        DimensionId::WordOrder => &WORD_ORDERS,
        DimensionId::Definiteness => &["Articles", "Demonstratives", "None"],
        DimensionId::Negation => &["Particle", "Suffix+particle", "Suffix"],
        DimensionId::RelativeClauses => &["Postnominal", "Prenominal", "Internally headed"],
        DimensionId::Copula => &["Explicit", "Often omitted", "Absent"],
        _ => &[],
    }
}

fn frac() -> impl Strategy<Value = f64> {
    (0u32..=100).prop_map(|v| f64::from(v) / 100.0)
}

/// A value of the same kind the shipped English profile uses for `id`.
fn value_for(id: DimensionId) -> BoxedStrategy<DimensionValue> {
    match shipped::english().dimension(id).value.clone() {
        DimensionValue::Categorical(_) => proptest::sample::select(labels(id))
            .prop_map(|l| DimensionValue::Categorical(l.to_string()))
            .boxed(),
        DimensionValue::Numeric(_) => frac().prop_map(DimensionValue::Numeric).boxed(),
        DimensionValue::FeatureSet(_) => proptest::sample::subsequence(FEATURES.to_vec(), 0..=FEATURES.len())
            .prop_map(|v| DimensionValue::FeatureSet(v.into_iter().map(String::from).collect()))
            .boxed(),
        DimensionValue::Composite(parts) => proptest::collection::vec(frac(), parts.len())
            .prop_map(move |vals| {
                DimensionValue::Composite(
                    parts
                        .iter()
                        .zip(vals)
                        .map(|(c, v)| Component {
                            name: c.name.clone(),
                            value: v,
                        })
                        .collect(),
                )
            })
            .boxed(),
        DimensionValue::Boolean(_) => any::<bool>().prop_map(DimensionValue::Boolean).boxed(),
        DimensionValue::BooleanPair(..) => any::<(bool, bool)>()
            .prop_map(|(a, b)| DimensionValue::BooleanPair(a, b))
            .boxed(),
    }
}

fn profile() -> impl Strategy<Value = LanguageProfile> {
    let parts: Vec<_> = DimensionId::ALL.iter().map(|id| value_for(*id)).collect();
    parts.prop_map(|values| {
        let mut p = shipped::english();
        for (id, v) in DimensionId::ALL.iter().zip(values) {
            p = p.with_dimension(Dimension::new(*id, v));
        }
        p
    })
}

fn divergence() -> impl Strategy<Value = DivergenceVector> {
    proptest::collection::vec(prop_oneof![Just(0.0), frac()], 16)
        .prop_map(|v| DivergenceVector(PerDimension::from_fn(|id| v[id.index()])))
}

fn feature_set() -> impl Strategy<Value = BTreeSet<String>> {
    proptest::collection::btree_set("[a-e]{1,2}", 0..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn numeric_symmetric_bounded(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let d = numeric_divergence(a, b).unwrap();
        prop_assert_eq!(d, numeric_divergence(b, a).unwrap());
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(numeric_divergence(a, a).unwrap(), 0.0);
    }

    #[test]
    fn set_matches_jaccard_oracle(a in feature_set(), b in feature_set()) {
        let d = set_divergence(&a, &b);
        let union = a.union(&b).count();
        let expected = if union == 0 { 0.0 } else { 1.0 - a.intersection(&b).count() as f64 / union as f64 };
        prop_assert!((d - expected).abs() < 1e-12);
        prop_assert_eq!(d, set_divergence(&b, &a));
        prop_assert_eq!(set_divergence(&a, &a), 0.0);
    }

    #[test]
    fn composite_bounded_symmetric(a in proptest::collection::vec(frac(), 3), b in proptest::collection::vec(frac(), 3)) {
        let mk = |v: &[f64]| -> Vec<Component> {
            ["tense", "aspect", "mood"].iter().zip(v).map(|(n, x)| Component { name: n.to_string(), value: *x }).collect()
        };
        let w = [0.4, 0.4, 0.2];
        let d = composite_divergence(&mk(&a), &mk(&b), &w).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, composite_divergence(&mk(&b), &mk(&a), &w).unwrap());
        let oracle: f64 = a.iter().zip(&b).zip(w).map(|((x, y), w)| w * (x - y).abs()).sum();
        prop_assert!((d - oracle).abs() < 1e-12);
    }

    #[test]
    fn profile_divergence_symmetric_bounded(p in profile(), q in profile()) {
        let pq = compute_divergence_vector(&p, &q).unwrap();
        let qp = compute_divergence_vector(&q, &p).unwrap();
        prop_assert_eq!(&pq, &qp);
        prop_assert!(pq.values().iter().all(|(_, v)| (0.0..=1.0).contains(v)));
        prop_assert!(compute_divergence_vector(&p, &p).unwrap().is_zero());
    }

    #[test]
    fn directive_scale_invariant(d in divergence(), factor in 0.01f64..100.0) {
        prop_assume!(!d.is_zero());
        let w = WeightSet::default();
        let pair = || LanguagePair::new("a", "b");
        let base = normalize_directive(&apply_weights(&d, &w).unwrap(), pair()).unwrap();
        let scaled = normalize_directive(&apply_weights(&d, &w.scaled(factor)).unwrap(), pair()).unwrap();
        for id in DimensionId::ALL {
            prop_assert!((base.get(id) - scaled.get(id)).abs() < 1e-12);
        }
    }

    #[test]
    fn directive_unit_norm_and_zero_preserving(d in divergence()) {
        prop_assume!(!d.is_zero());
        let v = normalize_directive(&apply_weights(&d, &WeightSet::default()).unwrap(), LanguagePair::new("a", "b")).unwrap();
        prop_assert!((v.values.l2_norm() - 1.0).abs() < 1e-9);
        for id in DimensionId::ALL {
            prop_assert!((0.0..=1.0).contains(&v.get(id)));
            if d.get(id) == 0.0 {
                prop_assert_eq!(v.get(id), 0.0);
                prop_assert!(!v.is_active(id));
            }
        }
    }
}

#[test]
fn word_order_table_is_symmetric_with_zero_diagonal() {
    for a in WORD_ORDERS {
        for b in WORD_ORDERS {
            let ab = categorical_divergence(DimensionId::WordOrder, a, b).unwrap();
            assert_eq!(ab, categorical_divergence(DimensionId::WordOrder, b, a).unwrap());
            assert_eq!(ab == 0.0, a == b, "{a} {b}");
        }
    }
}
