//! Retrieval and tracking metrics for mined scenarios.
//!
//! * Timestamp F1: per-frame scenario labels, counts pooled over every
//!   (query, log) pair.
//! * Log F1: one binary decision per (query, log) pair, counts pooled.
//! * HOTA-Temporal: HOTA restricted to the exact `(track, timestamp)` pairs
//!   of the prediction and of the ground truth. Logs of one query are pooled
//!   into a single sequence and the per-query scores are averaged.
//! * HOTA: the same, but with every referenced track widened to its full
//!   lifespan.

mod assignment;
mod hota;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

pub use assignment::max_weight_matching;
pub use hota::{
    alphas, frames_from_sets, full_lifespans, hota, similarity, AlphaCounts, CenterDistance,
    Detection, HotaResult, SimilarityKernel, TrackingFrame, ALPHA_COUNT,
};

use crate::scenario::ScenarioSet;
use crate::tracklog::{GroundTruthScenario, Timestamp, TrackLog};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),
    #[error("nothing to evaluate")]
    Empty,
}

/// Pooled confusion counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct F1Counts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl F1Counts {
    pub fn add(&mut self, other: F1Counts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }

    pub fn precision(&self) -> f64 {
        if self.tp + self.fp == 0 {
            if self.fn_ == 0 { 1.0 } else { 0.0 }
        } else {
            self.tp as f64 / (self.tp + self.fp) as f64
        }
    }

    pub fn recall(&self) -> f64 {
        if self.tp + self.fn_ == 0 {
            if self.fp == 0 { 1.0 } else { 0.0 }
        } else {
            self.tp as f64 / (self.tp + self.fn_) as f64
        }
    }

    /// `2PR / (P + R)`; 1 when both sides are empty everywhere, 0 when
    /// nothing matches.
    pub fn f1(&self) -> f64 {
        if self.tp + self.fp + self.fn_ == 0 {
            return 1.0;
        }
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

/// Predicted and ground-truth scenario timestamps for one (query, log).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FrameLabels {
    pub predicted: BTreeSet<Timestamp>,
    pub ground_truth: BTreeSet<Timestamp>,
}

impl FrameLabels {
    pub fn from_sets(pred: &ScenarioSet, gt: &ScenarioSet) -> Self {
        Self {
            predicted: pred.all_timestamps(),
            ground_truth: gt.all_timestamps(),
        }
    }

    pub fn counts(&self) -> F1Counts {
        let tp = self.predicted.intersection(&self.ground_truth).count() as u64;
        F1Counts {
            tp,
            fp: self.predicted.len() as u64 - tp,
            fn_: self.ground_truth.len() as u64 - tp,
        }
    }
}

pub fn timestamp_f1(frames: &[FrameLabels]) -> F1Counts {
    let mut total = F1Counts::default();
    for f in frames {
        total.add(f.counts());
    }
    total
}

/// Each item is `(predicted positive, ground truth positive)`.
pub fn log_f1(outcomes: &[(bool, bool)]) -> F1Counts {
    let mut c = F1Counts::default();
    for &(pred, gt) in outcomes {
        match (pred, gt) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => {}
        }
    }
    c
}

/// HOTA on one (prediction, ground truth) pair restricted to the exact
/// scenario pairs.
pub fn hota_temporal<K: SimilarityKernel + ?Sized>(
    pred: &ScenarioSet,
    gt: &GroundTruthScenario,
    log: &TrackLog,
    kernel: &K,
) -> Result<HotaResult, MetricsError> {
    gt.validate_against(log)
        .map_err(|e| MetricsError::InconsistentInput(format!("{e}")))?;
    hota(&frames_from_sets(log, pred, &gt.relevant, "")?, kernel)
}

/// One prediction to score.
#[derive(Clone, Copy, Debug)]
pub struct EvalItem<'a> {
    pub log: &'a TrackLog,
    pub gt: &'a GroundTruthScenario,
    pub pred: &'a ScenarioSet,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QueryBreakdown {
    pub query_text: String,
    pub log_ids: Vec<String>,
    pub hota_temporal: HotaResult,
    pub hota: HotaResult,
    pub timestamp: F1Counts,
    pub log: F1Counts,
}

/// Aggregated scores, each in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub hota_temporal: f64,
    pub hota: f64,
    pub timestamp_f1: f64,
    pub log_f1: f64,
    pub timestamp_counts: F1Counts,
    pub log_counts: F1Counts,
    /// `(alpha, mean per-query HOTA-Temporal at alpha)`.
    pub hota_temporal_curve: Vec<(f64, f64)>,
    pub hota_curve: Vec<(f64, f64)>,
    pub per_query: Vec<QueryBreakdown>,
}

fn mean_curve(results: &[&HotaResult]) -> Vec<(f64, f64)> {
    alphas()
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let total: f64 = results.iter().map(|r| r.curve[k].hota()).sum();
            (a, total / results.len() as f64)
        })
        .collect()
}

impl EvalReport {
    /// Aggregates per-query intermediates.
    pub fn from_breakdown(per_query: Vec<QueryBreakdown>) -> Result<Self, MetricsError> {
        if per_query.is_empty() {
            return Err(MetricsError::Empty);
        }
        let n = per_query.len() as f64;
        let mut ts = F1Counts::default();
        let mut logs = F1Counts::default();
        for q in &per_query {
            ts.add(q.timestamp);
            logs.add(q.log);
        }
        let ht: Vec<&HotaResult> = per_query.iter().map(|q| &q.hota_temporal).collect();
        let h: Vec<&HotaResult> = per_query.iter().map(|q| &q.hota).collect();
        Ok(Self {
            hota_temporal: ht.iter().map(|r| r.hota).sum::<f64>() / n,
            hota: h.iter().map(|r| r.hota).sum::<f64>() / n,
            timestamp_f1: ts.f1(),
            log_f1: logs.f1(),
            timestamp_counts: ts,
            log_counts: logs,
            hota_temporal_curve: mean_curve(&ht),
            hota_curve: mean_curve(&h),
            per_query,
        })
    }
}

/// Scores every item, grouping by query text.
pub fn evaluate<K: SimilarityKernel + ?Sized>(
    items: &[EvalItem<'_>],
    kernel: &K,
) -> Result<EvalReport, MetricsError> {
    let mut by_query: BTreeMap<&str, Vec<&EvalItem<'_>>> = BTreeMap::new();
    for item in items {
        item.gt
            .validate_against(item.log)
            .map_err(|e| MetricsError::InconsistentInput(format!("{e}")))?;
        by_query.entry(item.gt.query_text.as_str()).or_default().push(item);
    }
    let mut per_query = Vec::with_capacity(by_query.len());
    for (query, mut group) in by_query {
        group.sort_by(|a, b| a.log.log_id().cmp(b.log.log_id()));
        let mut temporal = Vec::new();
        let mut widened = Vec::new();
        let mut ts = F1Counts::default();
        let mut outcomes = Vec::new();
        let mut log_ids = Vec::new();
        for item in &group {
            let prefix = format!("{}/", item.log.log_id());
            temporal.extend(frames_from_sets(item.log, item.pred, &item.gt.relevant, &prefix)?);
            widened.extend(frames_from_sets(
                item.log,
                &full_lifespans(item.log, item.pred),
                &full_lifespans(item.log, &item.gt.relevant),
                &prefix,
            )?);
            ts.add(FrameLabels::from_sets(item.pred, &item.gt.relevant).counts());
            outcomes.push((!item.pred.is_empty(), item.gt.is_positive_log()));
            log_ids.push(String::from(item.log.log_id()));
        }
        per_query.push(QueryBreakdown {
            query_text: query.into(),
            log_ids,
            hota_temporal: hota(&temporal, kernel)?,
            hota: hota(&widened, kernel)?,
            timestamp: ts,
            log: log_f1(&outcomes),
        });
    }
    EvalReport::from_breakdown(per_query)
}
