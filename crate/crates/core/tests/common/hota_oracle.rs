//! Exhaustive-matching HOTA: per frame, every partial one-to-one matching
//! over pairs with similarity >= alpha is enumerated and the one with the
//! largest total similarity wins.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scenmine_core::metrics::{Detection, TrackingFrame};
use scenmine_core::ObjectState;

/// `(gt, pred)` detections of one frame; ids and 3D centers.
pub type Frame = (Vec<(String, [f64; 3])>, Vec<(String, [f64; 3])>);

fn sim(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
    (1.0 - d / 2.0).max(0.0)
}

/// Best matching as `(gt index, pred index)` pairs.
fn best(s: &[Vec<f64>], alpha: f64, row: usize, used: &mut Vec<bool>, cur: &mut Vec<(usize, usize)>, acc: f64, top: &mut (f64, Vec<(usize, usize)>)) {
    if row == s.len() {
        if acc > top.0 {
            *top = (acc, cur.clone());
        }
        return;
    }
    best(s, alpha, row + 1, used, cur, acc, top);
    for j in 0..used.len() {
        if !used[j] && s[row][j] >= alpha {
            used[j] = true;
            cur.push((row, j));
            best(s, alpha, row + 1, used, cur, acc + s[row][j], top);
            cur.pop();
            used[j] = false;
        }
    }
}

pub fn hota(frames: &[Frame]) -> f64 {
    let mut gt_len: BTreeMap<&str, f64> = BTreeMap::new();
    let mut pr_len: BTreeMap<&str, f64> = BTreeMap::new();
    for (g, p) in frames {
        for (id, _) in g {
            *gt_len.entry(id).or_default() += 1.0;
        }
        for (id, _) in p {
            *pr_len.entry(id).or_default() += 1.0;
        }
    }
    let mut total = 0.0;
    for k in 1..=19 {
        let alpha = k as f64 / 20.0;
        let (mut tp, mut fn_, mut fp) = (0.0, 0.0, 0.0);
        let mut pairs: BTreeMap<(&str, &str), f64> = BTreeMap::new();
        for (g, p) in frames {
            let s: Vec<Vec<f64>> = g.iter().map(|(_, a)| p.iter().map(|(_, b)| sim(*a, *b)).collect()).collect();
            let mut top = (-1.0, Vec::new());
            best(&s, alpha, 0, &mut vec![false; p.len()], &mut Vec::new(), 0.0, &mut top);
            let m = top.1.len() as f64;
            tp += m;
            fn_ += g.len() as f64 - m;
            fp += p.len() as f64 - m;
            for (i, j) in top.1 {
                *pairs.entry((g[i].0.as_str(), p[j].0.as_str())).or_default() += 1.0;
            }
        }
        let denom = tp + fn_ + fp;
        let score = if denom == 0.0 {
            1.0
        } else {
            let a: f64 = pairs
                .iter()
                .map(|(&(g, p), &n)| n * n / (gt_len[g] + pr_len[p] - n))
                .sum();
            (a / denom).sqrt()
        };
        total += score;
    }
    total / 19.0
}

pub fn to_library(frames: &[Frame]) -> Vec<TrackingFrame> {
    let det = |(id, p): &(String, [f64; 3])| Detection {
        track_id: id.clone(),
        state: ObjectState {
            position: *p,
            heading: 0.0,
            velocity: [0.0; 3],
            box_dims: [1.0; 3],
        },
    };
    frames
        .iter()
        .map(|(g, p)| TrackingFrame {
            gt: g.iter().map(det).collect(),
            pred: p.iter().map(det).collect(),
        })
        .collect()
}

/// Up to 3 tracks per side over up to 5 frames, centers within a few
/// meters so similarities spread over (0, 1).
pub fn random_instance(seed: u64) -> Vec<Frame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_frames = rng.random_range(1..=5);
    let n_gt = rng.random_range(0..=3);
    let n_pred = rng.random_range(0..=3);
    let anchor = |rng: &mut ChaCha8Rng| [rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5), rng.random_range(-0.3..0.3)];
    let gt_start: Vec<[f64; 3]> = (0..n_gt).map(|_| anchor(&mut rng)).collect();
    let pred_start: Vec<[f64; 3]> = (0..n_pred).map(|_| anchor(&mut rng)).collect();
    (0..n_frames)
        .map(|_| {
            let side = |prefix: &str, starts: &[[f64; 3]], rng: &mut ChaCha8Rng| {
                let mut out = Vec::new();
                for (i, s) in starts.iter().enumerate() {
                    if rng.random_bool(0.8) {
                        let p = [s[0] + rng.random_range(-0.7..0.7), s[1] + rng.random_range(-0.7..0.7), s[2]];
                        out.push((format!("{prefix}{i}"), p));
                    }
                }
                out
            };
            let g = side("g", &gt_start, &mut rng);
            let p = side("p", &pred_start, &mut rng);
            (g, p)
        })
        .collect()
}
