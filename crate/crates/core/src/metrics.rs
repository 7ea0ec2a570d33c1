//! Intervention metrics over rerank results and human labels.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rerank::RerankResult;

/// Annotator id whose label settles disagreements.
pub const ADJUDICATOR_ID: &str = "adjudicator";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Improvement,
    Neutral,
    Error,
}

impl Classification {
    pub const ALL: [Classification; 3] = [
        Classification::Improvement,
        Classification::Neutral,
        Classification::Error,
    ];

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterventionLabel {
    pub sentence_id: String,
    pub annotator_id: String,
    pub classification: Classification,
}

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("no input to aggregate")]
    EmptyInput,
    #[error("no interventions; the metric is undefined")]
    NoInterventions,
    #[error("label lists differ: {0}")]
    LengthMismatch(String),
    #[error("both annotators use a single category with disagreement; kappa is undefined")]
    DegenerateMarginals,
    #[error("label references unknown sentence id `{0}`")]
    IdMismatch(String),
    #[error("label file: {0}")]
    Labels(#[from] csv::Error),
    #[error("label file must have header `sentence_id,annotator_id,classification`, got `{0}`")]
    Header(String),
}

pub fn change_rate(results: &[RerankResult]) -> Result<f64, MetricsError> {
    let changed = results.iter().filter(|r| r.changed).count();
    change_rate_from_counts(changed, results.len())
}

pub fn change_rate_from_counts(changed: usize, total: usize) -> Result<f64, MetricsError> {
    if total == 0 {
        return Err(MetricsError::EmptyInput);
    }
    Ok(100.0 * changed as f64 / total as f64)
}

/// Percentage of interventions judged improvements. Neutral labels count
/// against precision.
pub fn intervention_precision(improvements: usize, interventions: usize) -> Result<f64, MetricsError> {
    if interventions == 0 {
        return Err(MetricsError::NoInterventions);
    }
    Ok(100.0 * improvements as f64 / interventions as f64)
}

/// Improvements per error, with an explicit infinity for zero errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainRisk {
    Finite(f64),
    Infinite,
}

impl GainRisk {
    pub fn value(self) -> f64 {
        match self {
            GainRisk::Finite(v) => v,
            GainRisk::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for GainRisk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GainRisk::Finite(v) => write!(f, "{v:.2}"),
            GainRisk::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for GainRisk {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            GainRisk::Finite(v) => s.serialize_f64(*v),
            GainRisk::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for GainRisk {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(GainRisk::Finite(v)),
            Repr::Text(t) if t == "inf" => Ok(GainRisk::Infinite),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("bad gain-risk `{t}`"))),
        }
    }
}

/// `improvements / errors`. Needs at least one intervention.
pub fn gain_risk(improvements: usize, errors: usize, interventions: usize) -> Result<GainRisk, MetricsError> {
    if interventions == 0 {
        return Err(MetricsError::NoInterventions);
    }
    Ok(match (improvements, errors) {
        (0, 0) => GainRisk::Finite(0.0),
        (_, 0) => GainRisk::Infinite,
        (i, e) => GainRisk::Finite(i as f64 / e as f64),
    })
}

/// Mean UMF score of the chosen candidates. Results skipped without
/// scoring are left out.
pub fn mean_compliance(results: &[RerankResult]) -> Result<f64, MetricsError> {
    let scores: Vec<f64> = results.iter().filter_map(RerankResult::chosen_umf).collect();
    if scores.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

/// Cohen's kappa over aligned three-way label lists.
pub fn cohen_kappa(a: &[Classification], b: &[Classification]) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch(format!(
            "{} vs {} labels",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let n = a.len() as f64;
    let mut confusion = [[0usize; 3]; 3];
    for (x, y) in a.iter().zip(b) {
        confusion[x.index()][y.index()] += 1;
    }
    let observed = (0..3).map(|k| confusion[k][k]).sum::<usize>() as f64 / n;
    let expected: f64 = (0..3)
        .map(|k| {
            let row: usize = confusion[k].iter().sum();
            let col: usize = confusion.iter().map(|r| r[k]).sum();
            (row as f64 / n) * (col as f64 / n)
        })
        .sum();
    if expected == 1.0 {
        return if observed == 1.0 {
            Ok(1.0)
        } else {
            Err(MetricsError::DegenerateMarginals)
        };
    }
    Ok((observed - expected) / (1.0 - expected))
}

/// Kappa between two annotators' labels, aligned by sentence id.
pub fn cohen_kappa_by_id(a: &[InterventionLabel], b: &[InterventionLabel]) -> Result<f64, MetricsError> {
    let index = |labels: &[InterventionLabel]| -> Result<BTreeMap<String, Classification>, MetricsError> {
        let mut map = BTreeMap::new();
        for l in labels {
            if map.insert(l.sentence_id.clone(), l.classification).is_some() {
                return Err(MetricsError::LengthMismatch(format!(
                    "sentence `{}` labelled twice",
                    l.sentence_id
                )));
            }
        }
        Ok(map)
    };
    let (ma, mb) = (index(a)?, index(b)?);
    if let Some(id) = ma
        .keys()
        .find(|k| !mb.contains_key(*k))
        .or_else(|| mb.keys().find(|k| !ma.contains_key(*k)))
    {
        return Err(MetricsError::LengthMismatch(format!(
            "sentence `{id}` is labelled by only one annotator"
        )));
    }
    let xs: Vec<_> = ma.values().copied().collect();
    let ys: Vec<_> = mb.values().copied().collect();
    cohen_kappa(&xs, &ys)
}

/// Pearson correlation; `None` for fewer than two points or zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    (vx > 0.0 && vy > 0.0).then(|| cov / (vx * vy).sqrt())
}

/// Reads a label CSV with header `sentence_id,annotator_id,classification`.
pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<InterventionLabel>, MetricsError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    read_labels(&mut reader)
}

pub fn parse_labels(text: &str) -> Result<Vec<InterventionLabel>, MetricsError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    read_labels(&mut reader)
}

fn read_labels<R: std::io::Read>(reader: &mut csv::Reader<R>) -> Result<Vec<InterventionLabel>, MetricsError> {
    let header = reader.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != ["sentence_id", "annotator_id", "classification"] {
        return Err(MetricsError::Header(header.iter().collect::<Vec<_>>().join(",")));
    }
    reader
        .deserialize()
        .collect::<Result<Vec<InterventionLabel>, _>>()
        .map_err(MetricsError::from)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Adjudication {
    pub decided: BTreeMap<String, Classification>,
    /// Sentences with disagreement and no adjudicator label.
    pub excluded: Vec<String>,
}

/// One label per sentence: the adjudicator's if present, else the
/// annotators' shared label. Unresolved disagreements are excluded.
pub fn adjudicate(labels: &[InterventionLabel]) -> Adjudication {
    let mut by_sentence: BTreeMap<&str, (Option<Classification>, BTreeSet<Classification>)> = BTreeMap::new();
    for l in labels {
        let slot = by_sentence.entry(&l.sentence_id).or_default();
        if l.annotator_id.eq_ignore_ascii_case(ADJUDICATOR_ID) {
            slot.0 = Some(l.classification);
        } else {
            slot.1.insert(l.classification);
        }
    }
    let mut out = Adjudication::default();
    for (id, (adjudicated, votes)) in by_sentence {
        let decision = adjudicated.or_else(|| (votes.len() == 1).then(|| *votes.iter().next().unwrap()));
        match decision {
            Some(c) => {
                out.decided.insert(id.to_string(), c);
            }
            None => {
                log::warn!("sentence `{id}`: annotators disagree and no adjudicator label; excluded");
                out.excluded.push(id.to_string());
            }
        }
    }
    out
}

/// Raw counts behind a report.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportCounts {
    pub total_cases: usize,
    pub interventions: usize,
    /// Interventions with a final human label; the precision denominator.
    pub judged: usize,
    pub improvements: usize,
    pub neutrals: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    #[serde(flatten)]
    pub counts: ReportCounts,
    pub change_rate: f64,
    pub intervention_precision: Option<f64>,
    pub gain_risk: Option<GainRisk>,
    pub mean_umf_score: Option<f64>,
    pub kappa: Option<f64>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl MetricsReport {
    pub fn from_counts(counts: ReportCounts) -> Result<Self, MetricsError> {
        let change_rate = change_rate_from_counts(counts.interventions, counts.total_cases)?;
        let mut warnings = Vec::new();
        if counts.interventions > counts.total_cases {
            warnings.push(format!(
                "inconsistent counts: {} interventions exceed {} total cases",
                counts.interventions, counts.total_cases
            ));
        }
        if counts.judged > counts.interventions {
            warnings.push(format!(
                "inconsistent counts: {} judged exceed {} interventions",
                counts.judged, counts.interventions
            ));
        }
        let labelled = counts.improvements + counts.neutrals + counts.errors;
        if labelled != counts.judged {
            warnings.push(format!(
                "inconsistent counts: improvements + neutrals + errors = {} + {} + {} = {labelled}, but {} interventions were judged",
                counts.improvements, counts.neutrals, counts.errors, counts.judged
            ));
        }
        let intervention_precision = intervention_precision(counts.improvements, counts.judged).ok();
        let gain_risk = gain_risk(counts.improvements, counts.errors, counts.judged).ok();
        if intervention_precision.is_none() {
            warnings.push("no judged interventions; precision and gain-risk are undefined".into());
        }
        Ok(MetricsReport {
            counts,
            change_rate,
            intervention_precision,
            gain_risk,
            mean_umf_score: None,
            kappa: None,
            warnings,
        })
    }

    pub fn is_consistent(&self) -> bool {
        !self.warnings.iter().any(|w| w.starts_with("inconsistent counts"))
    }

    /// Text table with one row: total cases, change rate, precision, gain-risk.
    pub fn render_table(&self, label: &str) -> String {
        let precision = self
            .intervention_precision
            .map_or_else(|| "n/a".to_string(), |p| format!("{p:.2}%"));
        let gain = self.gain_risk.map_or_else(|| "n/a".to_string(), |g| g.to_string());
        let rows = [
            [
                "Language".to_string(),
                "Total Cases".to_string(),
                "Change Rate".to_string(),
                "Intervention Precision".to_string(),
                "Gain-Risk".to_string(),
            ],
            [
                label.to_string(),
                self.counts.total_cases.to_string(),
                format!("{:.2}%", self.change_rate),
                precision,
                gain,
            ],
        ];
        let widths: Vec<usize> = (0..5)
            .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (i, row) in rows.iter().enumerate() {
            let cells: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(c, cell)| {
                    if c == 0 {
                        format!("{cell:<w$}", w = widths[c])
                    } else {
                        format!("{cell:>w$}", w = widths[c])
                    }
                })
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
            if i == 0 {
                out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
                out.push('\n');
            }
        }
        out
    }
}
