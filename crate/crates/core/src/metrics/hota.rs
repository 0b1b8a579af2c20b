//! Higher Order Tracking Accuracy.
//!
//! For each localization threshold alpha, detections are matched frame by
//! frame with a maximum-total-similarity assignment over pairs whose
//! similarity reaches alpha. Each true-positive match `c = (gt, pred)` then
//! gets an association score
//! `A(c) = TPA(c) / (TPA(c) + FNA(c) + FPA(c))` over the whole sequence, and
//! `HOTA_alpha = sqrt(sum_c A(c) / (TP + FN + FP))`. The final score is the
//! mean over the 19 thresholds 0.05, 0.10, ..., 0.95.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::assignment::max_weight_matching;
use super::MetricsError;
use crate::math;
use crate::scenario::ScenarioSet;
use crate::tracklog::{ObjectState, TrackLog};

/// Number of localization thresholds.
pub const ALPHA_COUNT: usize = 19;

/// The thresholds 0.05, 0.10, ..., 0.95.
pub fn alphas() -> [f64; ALPHA_COUNT] {
    core::array::from_fn(|k| (k + 1) as f64 / 20.0)
}

/// Localization similarity between a ground-truth and a predicted state.
pub trait SimilarityKernel {
    /// A value in `[0, 1]`.
    fn similarity(&self, gt: &ObjectState, pred: &ObjectState) -> f64;
}

/// `max(0, 1 - d / d_max)` with `d` the 3D center distance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CenterDistance {
    pub d_max: f64,
}

impl Default for CenterDistance {
    fn default() -> Self {
        Self { d_max: 2.0 }
    }
}

impl SimilarityKernel for CenterDistance {
    fn similarity(&self, gt: &ObjectState, pred: &ObjectState) -> f64 {
        let d2: f64 = (0..3)
            .map(|i| {
                let d = gt.position[i] - pred.position[i];
                d * d
            })
            .sum();
        let s = 1.0 - math::sqrt(d2) / self.d_max;
        if s > 0.0 {
            s
        } else {
            0.0
        }
    }
}

/// Similarity under the default center-distance kernel (`d_max = 2 m`).
pub fn similarity(gt: &ObjectState, pred: &ObjectState) -> f64 {
    CenterDistance::default().similarity(gt, pred)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    pub track_id: String,
    pub state: ObjectState,
}

/// The detections of both sides at one timestamp.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrackingFrame {
    pub gt: Vec<Detection>,
    pub pred: Vec<Detection>,
}

/// Intermediate counts at one alpha.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlphaCounts {
    pub alpha: f64,
    pub tp: u64,
    pub fn_: u64,
    pub fp: u64,
    /// Sum of `A(c)` over true positives.
    pub assoc_sum: f64,
}

impl AlphaCounts {
    pub fn hota(&self) -> f64 {
        let denom = self.tp + self.fn_ + self.fp;
        if denom == 0 {
            return 1.0;
        }
        math::sqrt(self.assoc_sum / denom as f64)
    }

    pub fn det_a(&self) -> f64 {
        let denom = self.tp + self.fn_ + self.fp;
        if denom == 0 {
            1.0
        } else {
            self.tp as f64 / denom as f64
        }
    }

    pub fn ass_a(&self) -> f64 {
        if self.tp == 0 {
            if self.fn_ + self.fp == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            self.assoc_sum / self.tp as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HotaResult {
    pub hota: f64,
    pub curve: Vec<AlphaCounts>,
}

impl HotaResult {
    pub fn from_curve(curve: Vec<AlphaCounts>) -> Self {
        let hota = curve.iter().map(AlphaCounts::hota).sum::<f64>() / curve.len() as f64;
        Self { hota, curve }
    }
}

fn check_frame(frame: &TrackingFrame) -> Result<(), MetricsError> {
    for side in [&frame.gt, &frame.pred] {
        let mut seen = BTreeSet::new();
        for d in side {
            if !seen.insert(d.track_id.as_str()) {
                return Err(MetricsError::InconsistentInput(format!(
                    "track `{}` appears twice in one frame",
                    d.track_id
                )));
            }
        }
    }
    Ok(())
}

/// Per frame, the similarity matrix with rows and columns in track-id order.
struct PreparedFrame<'a> {
    gt: Vec<&'a str>,
    pred: Vec<&'a str>,
    sim: Vec<Vec<f64>>,
}

fn prepare<'a, K: SimilarityKernel + ?Sized>(frame: &'a TrackingFrame, kernel: &K) -> PreparedFrame<'a> {
    let mut gt: Vec<&Detection> = frame.gt.iter().collect();
    let mut pred: Vec<&Detection> = frame.pred.iter().collect();
    gt.sort_by(|a, b| a.track_id.cmp(&b.track_id));
    pred.sort_by(|a, b| a.track_id.cmp(&b.track_id));
    let sim = gt
        .iter()
        .map(|g| pred.iter().map(|p| kernel.similarity(&g.state, &p.state)).collect())
        .collect();
    PreparedFrame {
        gt: gt.iter().map(|d| d.track_id.as_str()).collect(),
        pred: pred.iter().map(|d| d.track_id.as_str()).collect(),
        sim,
    }
}

/// HOTA over a sequence of frames.
pub fn hota<K: SimilarityKernel + ?Sized>(
    frames: &[TrackingFrame],
    kernel: &K,
) -> Result<HotaResult, MetricsError> {
    for f in frames {
        check_frame(f)?;
    }
    let prepared: Vec<PreparedFrame<'_>> = frames.iter().map(|f| prepare(f, kernel)).collect();
    let mut gt_len: BTreeMap<&str, u64> = BTreeMap::new();
    let mut pred_len: BTreeMap<&str, u64> = BTreeMap::new();
    for f in &prepared {
        for g in &f.gt {
            *gt_len.entry(g).or_default() += 1;
        }
        for p in &f.pred {
            *pred_len.entry(p).or_default() += 1;
        }
    }
    let curve = alphas()
        .into_iter()
        .map(|alpha| {
            let mut tp = 0u64;
            let mut fn_ = 0u64;
            let mut fp = 0u64;
            let mut pairs: BTreeMap<(&str, &str), u64> = BTreeMap::new();
            for f in &prepared {
                let weights: Vec<Vec<Option<f64>>> = f
                    .sim
                    .iter()
                    .map(|row| row.iter().map(|&s| (s >= alpha).then_some(s)).collect())
                    .collect();
                let matched = max_weight_matching(&weights, f.pred.len());
                let m = matched.len() as u64;
                tp += m;
                fn_ += f.gt.len() as u64 - m;
                fp += f.pred.len() as u64 - m;
                for (i, j) in matched {
                    *pairs.entry((f.gt[i], f.pred[j])).or_default() += 1;
                }
            }
            let assoc_sum = pairs
                .iter()
                .map(|(&(g, p), &tpa)| {
                    let fna = gt_len[g] - tpa;
                    let fpa = pred_len[p] - tpa;
                    tpa as f64 * (tpa as f64 / (tpa + fna + fpa) as f64)
                })
                .sum();
            AlphaCounts {
                alpha,
                tp,
                fn_,
                fp,
                assoc_sum,
            }
        })
        .collect();
    Ok(HotaResult::from_curve(curve))
}

/// One frame per log timestamp, with each side's `(track, timestamp)` pairs
/// looked up in `log`. Track ids are prefixed with `id_prefix` so frames
/// from several logs can be pooled.
pub fn frames_from_sets(
    log: &TrackLog,
    pred: &ScenarioSet,
    gt: &ScenarioSet,
    id_prefix: &str,
) -> Result<Vec<TrackingFrame>, MetricsError> {
    for (side, set) in [("prediction", pred), ("ground truth", gt)] {
        if let Some((id, t)) = set.first_missing_in(log) {
            return Err(MetricsError::InconsistentInput(format!(
                "{side} pair ({id}, {t}) is not in log `{}`",
                log.log_id()
            )));
        }
    }
    let mut frames: BTreeMap<i64, TrackingFrame> = log
        .timestamps()
        .iter()
        .map(|t| (*t, TrackingFrame::default()))
        .collect();
    for (set, is_gt) in [(gt, true), (pred, false)] {
        for (id, t) in set.pairs() {
            let state = log.object(id).and_then(|o| o.states.get(&t)).copied().expect("checked above");
            let det = Detection {
                track_id: format!("{id_prefix}{id}"),
                state,
            };
            let frame = frames.get_mut(&t).expect("checked above");
            if is_gt {
                frame.gt.push(det);
            } else {
                frame.pred.push(det);
            }
        }
    }
    Ok(frames.into_values().collect())
}

/// Widens every track of `set` to its full lifespan in `log`.
pub fn full_lifespans(log: &TrackLog, set: &ScenarioSet) -> ScenarioSet {
    let mut out = ScenarioSet::new();
    for id in set.track_ids() {
        if let Some(obj) = log.object(id) {
            out.insert_track(id, obj.states.keys().copied());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn det(id: &str, x: f64) -> Detection {
        Detection {
            track_id: id.into(),
            state: ObjectState {
                position: [x, 0.0, 0.0],
                heading: 0.0,
                velocity: [0.0; 3],
                box_dims: [1.0; 3],
            },
        }
    }

    #[test]
    fn similarity_examples() {
        let a = det("a", 0.0).state;
        assert_eq!(similarity(&a, &a), 1.0);
        assert_eq!(similarity(&a, &det("b", 2.0).state), 0.0);
        assert_eq!(similarity(&a, &det("b", 7.0).state), 0.0);
        assert_eq!(similarity(&a, &det("b", 0.5).state), 0.75);
    }

    #[test]
    fn alpha_grid() {
        let a = alphas();
        assert_eq!(a[0], 0.05);
        assert_eq!(a[18], 0.95);
        assert!(a.windows(2).all(|w| (w[1] - w[0] - 0.05).abs() < 1e-12));
    }

    #[test]
    fn perfect_and_empty() {
        let frames = vec![
            TrackingFrame { gt: vec![det("a", 0.0), det("b", 10.0)], pred: vec![det("1", 0.0), det("2", 10.0)] },
            TrackingFrame { gt: vec![det("a", 1.0)], pred: vec![det("1", 1.0)] },
        ];
        let r = hota(&frames, &CenterDistance::default()).unwrap();
        assert_eq!(r.hota, 1.0);
        assert!(r.curve.iter().all(|c| c.hota() == 1.0));

        let empty_pred: Vec<TrackingFrame> = frames
            .iter()
            .map(|f| TrackingFrame { gt: f.gt.clone(), pred: vec![] })
            .collect();
        assert_eq!(hota(&empty_pred, &CenterDistance::default()).unwrap().hota, 0.0);
        assert_eq!(hota(&[], &CenterDistance::default()).unwrap().hota, 1.0);
    }

    #[test]
    fn identity_swap_closed_form() {
        // gt a, b for 3 frames; prediction swaps identities on the last frame.
        let frames = vec![
            TrackingFrame { gt: vec![det("a", 0.0), det("b", 10.0)], pred: vec![det("1", 0.0), det("2", 10.0)] },
            TrackingFrame { gt: vec![det("a", 0.0), det("b", 10.0)], pred: vec![det("1", 0.0), det("2", 10.0)] },
            TrackingFrame { gt: vec![det("a", 0.0), det("b", 10.0)], pred: vec![det("2", 0.0), det("1", 10.0)] },
        ];
        let r = hota(&frames, &CenterDistance::default()).unwrap();
        // sum A = 4 * (2/4) + 2 * (1/5) = 2.4 over 6 detections
        assert!((r.hota - libm::sqrt(0.4)).abs() < 1e-12);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let frames = vec![TrackingFrame { gt: vec![det("a", 0.0), det("a", 1.0)], pred: vec![] }];
        assert!(matches!(hota(&frames, &CenterDistance::default()), Err(MetricsError::InconsistentInput(_))));
    }
}
