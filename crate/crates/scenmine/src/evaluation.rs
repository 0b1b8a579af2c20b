//! Scoring a predictions file against ground-truth files.

use std::collections::BTreeMap;
use std::fmt::Write;

use scenmine_core::metrics::{self, CenterDistance, EvalItem, EvalReport, MetricsError};
use scenmine_core::{GroundTruthScenario, ScenarioSet, TrackLog};
use serde::{Deserialize, Serialize};

use crate::io::Predictions;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("ground truth for `{query}` names log `{log_id}`, which is not loaded")]
    MissingLog { query: String, log_id: String },
    #[error("ground truth for `{query}` on log `{log_id}` appears twice")]
    DuplicateGroundTruth { query: String, log_id: String },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// How each number in the report was aggregated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub hota_temporal: String,
    pub hota: String,
    pub timestamp_f1: String,
    pub log_f1: String,
    pub similarity: String,
    pub empty: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            hota_temporal: "HOTA over the exact (track, timestamp) pairs; logs of a query pooled, mean over queries".into(),
            hota: "HOTA with every referenced track widened to its full lifespan; pooled and averaged like HOTA-Temporal".into(),
            timestamp_f1: "per-frame scenario labels, counts summed over all (query, log) pairs".into(),
            log_f1: "one positive/negative decision per (query, log) pair, counts summed".into(),
            similarity: "max(0, 1 - d / 2 m) on 3D box-center distance; alpha = 0.05, 0.10, ..., 0.95".into(),
            empty: "a ratio with an empty denominator scores 1.0 (nothing predicted, nothing expected)".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub conventions: Conventions,
    /// (query, log) pairs scored.
    pub evaluated_pairs: usize,
    /// Pairs with ground truth but no prediction entry, scored as empty.
    pub missing_predictions: usize,
    #[serde(flatten)]
    pub report: EvalReport,
}

/// Scores every ground-truth entry; a missing prediction counts as empty.
pub fn evaluate(
    predictions: &Predictions,
    ground_truth: &[GroundTruthScenario],
    logs: &BTreeMap<String, TrackLog>,
) -> Result<ReportFile, EvalError> {
    let empty = ScenarioSet::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut items = Vec::with_capacity(ground_truth.len());
    let mut missing = 0;
    for gt in ground_truth {
        if !seen.insert((gt.query_text.as_str(), gt.log_id.as_str())) {
            return Err(EvalError::DuplicateGroundTruth {
                query: gt.query_text.clone(),
                log_id: gt.log_id.clone(),
            });
        }
        let log = logs.get(&gt.log_id).ok_or_else(|| EvalError::MissingLog {
            query: gt.query_text.clone(),
            log_id: gt.log_id.clone(),
        })?;
        let pred = match predictions.get(&gt.query_text).and_then(|m| m.get(&gt.log_id)) {
            Some(p) => p,
            None => {
                missing += 1;
                &empty
            }
        };
        items.push(EvalItem { log, gt, pred });
    }
    let report = metrics::evaluate(&items, &CenterDistance::default())?;
    Ok(ReportFile {
        conventions: Conventions::default(),
        evaluated_pairs: items.len(),
        missing_predictions: missing,
        report,
    })
}

/// Plain-text table, scores in percent.
pub fn summary_table(report: &EvalReport) -> String {
    let mut out = String::new();
    // `+ 0.0` turns -0 into 0
    let pct = |x: f64| x * 100.0 + 0.0;
    let row = |out: &mut String, a: f64, b: f64, c: f64, d: f64, label: &str| {
        let _ = writeln!(out, "{:>8.2} {:>8.2} {:>8.2} {:>8.2}  {label}", pct(a), pct(b), pct(c), pct(d));
    };
    let _ = writeln!(out, "{:>8} {:>8} {:>8} {:>8}  scope", "HOTA-T", "HOTA", "TS-F1", "Log-F1");
    row(&mut out, report.hota_temporal, report.hota, report.timestamp_f1, report.log_f1, "all queries");
    for q in &report.per_query {
        row(
            &mut out,
            q.hota_temporal.hota,
            q.hota.hota,
            q.timestamp.f1(),
            q.log.f1(),
            &q.query_text,
        );
    }
    out
}
