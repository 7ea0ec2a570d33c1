//! Joins rerank results with human labels into a metrics report.

use std::collections::BTreeMap;

use crate::metrics::{
    adjudicate, cohen_kappa_by_id, mean_compliance, InterventionLabel, MetricsReport, ReportCounts, ADJUDICATOR_ID,
};
use crate::rerank::RerankResult;

use super::PipelineError;

/// Builds the report. `labels_b`, when given, is a second annotator's file;
/// both files feed adjudication and kappa is computed between them.
pub fn run_evaluate(
    results: &[RerankResult],
    labels: &[InterventionLabel],
    labels_b: Option<&[InterventionLabel]>,
) -> Result<MetricsReport, PipelineError> {
    let mut changed_by_id = BTreeMap::new();
    for r in results {
        let id = r.sentence_id.clone().unwrap_or_default();
        if changed_by_id.insert(id.clone(), r.changed).is_some() {
            return Err(PipelineError::DuplicateId(id));
        }
    }
    let all_labels: Vec<InterventionLabel> = labels.iter().chain(labels_b.unwrap_or_default()).cloned().collect();
    if let Some(bad) = all_labels.iter().find(|l| !changed_by_id.contains_key(&l.sentence_id)) {
        return Err(PipelineError::IdMismatch(bad.sentence_id.clone()));
    }

    let mut warnings = Vec::new();
    let adjudication = adjudicate(&all_labels);
    for id in &adjudication.excluded {
        warnings.push(format!("sentence `{id}`: unresolved annotator disagreement, excluded"));
    }
    let mut judged = BTreeMap::new();
    for (id, class) in &adjudication.decided {
        if changed_by_id[id] {
            judged.insert(id.clone(), *class);
        } else {
            warnings.push(format!(
                "sentence `{id}` is labelled but was not an intervention; label ignored"
            ));
        }
    }
    let interventions = changed_by_id.values().filter(|c| **c).count();
    let unlabelled = changed_by_id
        .iter()
        .filter(|(id, changed)| **changed && !judged.contains_key(*id) && !adjudication.excluded.contains(id))
        .count();
    if unlabelled > 0 {
        warnings.push(format!("{unlabelled} interventions have no label"));
    }

    let count = |c| judged.values().filter(|v| **v == c).count();
    use crate::metrics::Classification::*;
    let mut report = MetricsReport::from_counts(ReportCounts {
        total_cases: results.len(),
        interventions,
        judged: judged.len(),
        improvements: count(Improvement),
        neutrals: count(Neutral),
        errors: count(Error),
    })?;
    report.mean_umf_score = mean_compliance(results).ok();
    if let Some(b) = labels_b {
        let strip = |ls: &[InterventionLabel]| -> Vec<InterventionLabel> {
            ls.iter()
                .filter(|l| l.annotator_id != ADJUDICATOR_ID)
                .cloned()
                .collect()
        };
        match cohen_kappa_by_id(&strip(labels), &strip(b)) {
            Ok(k) => report.kappa = Some(k),
            Err(e) => warnings.push(format!("kappa unavailable: {e}")),
        }
    }
    report.warnings.extend(warnings);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidate::Candidate;
    use crate::metrics::Classification;

    fn result(id: &str, changed: bool) -> RerankResult {
        let base = Candidate::new("a", 1.0, 1);
        let chosen = if changed {
            Candidate::new("b", 0.5, 2)
        } else {
            base.clone()
        };
        RerankResult {
            sentence_id: Some(id.into()),
            source_text: "x".into(),
            chosen,
            baseline: base,
            changed,
            alpha: 0.5,
            skip_reason: None,
            plan: None,
            resolutions: vec![],
            per_candidate: vec![],
            provenance: None,
        }
    }

    fn label(id: &str, who: &str, c: Classification) -> InterventionLabel {
        InterventionLabel {
            sentence_id: id.into(),
            annotator_id: who.into(),
            classification: c,
        }
    }

    #[test]
    fn counts_and_kappa() {
        let results = [
            result("s1", true),
            result("s2", true),
            result("s3", false),
            result("s4", true),
        ];
        let a = [
            label("s1", "a", Classification::Improvement),
            label("s2", "a", Classification::Error),
            label("s4", "a", Classification::Neutral),
        ];
        let b = [
            label("s1", "b", Classification::Improvement),
            label("s2", "b", Classification::Error),
            label("s4", "b", Classification::Neutral),
        ];
        let report = run_evaluate(&results, &a, Some(&b)).unwrap();
        assert_eq!(report.counts.interventions, 3);
        assert_eq!(report.counts.judged, 3);
        assert_eq!(report.kappa, Some(1.0));
        assert!((report.change_rate - 75.0).abs() < 1e-12);
        assert!(report.is_consistent());
    }

    #[test]
    fn unknown_id_is_named() {
        let results = [result("s1", true)];
        let labels = [label("zz", "a", Classification::Improvement)];
        assert!(matches!(run_evaluate(&results, &labels, None), Err(PipelineError::IdMismatch(id)) if id == "zz"));
    }

    #[test]
    fn no_kappa_with_single_file() {
        let results = [result("s1", true)];
        let labels = [label("s1", "a", Classification::Improvement)];
        assert_eq!(run_evaluate(&results, &labels, None).unwrap().kappa, None);
    }
}
