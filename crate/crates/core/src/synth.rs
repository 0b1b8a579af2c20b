//! Deterministic synthetic logs with certified ground truth.
//!
//! Each template lays out a small cast of objects in a local frame with
//! closed-form kinematics (piecewise-constant velocity, optional constant
//! deceleration, 100 ms frames), computes the ground-truth pairs from that
//! layout, then applies a random rigid transform. Before a log is returned
//! the template's canonical program is run on it and must reproduce the
//! ground truth exactly; negatives must come back empty.
//!
//! Distractors are parked on a ring far outside every threshold of every
//! template, so they never take part in a relation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::category::{CategoryRegistry, ObjectCategory};
use crate::dsl;
use crate::geometry::Direction;
use crate::math::{self, FRAC_PI_2, PI};
use crate::registry::Registry;
use crate::scenario::ScenarioSet;
use crate::tracklog::{GroundTruthScenario, ObjectState, Timestamp, TrackLog, TrackLogError, TrackedObject};

/// Frame period.
pub const FRAME_NANOS: Timestamp = 100_000_000;
const DT: f64 = 0.1;
/// First timestamp of every synthetic log.
pub const BASE_TIMESTAMP: Timestamp = 1_600_000_000_000_000_000;
const MAX_FRAMES: usize = 2000;
const MAX_DISTRACTORS: usize = 64;
/// Minimum clearance between distractors and anything else.
const DISTRACTOR_CLEARANCE: f64 = 80.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Template {
    RelativeDirection,
    Crossing,
    Facing,
    HeadingToward,
    Near,
    BrakingSequence,
    Compound,
}

impl Template {
    pub const ALL: [Template; 7] = [
        Template::RelativeDirection,
        Template::Crossing,
        Template::Facing,
        Template::HeadingToward,
        Template::Near,
        Template::BrakingSequence,
        Template::Compound,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Template::RelativeDirection => "relative_direction",
            Template::Crossing => "crossing",
            Template::Facing => "facing",
            Template::HeadingToward => "heading_toward",
            Template::Near => "near",
            Template::BrakingSequence => "braking_sequence",
            Template::Compound => "compound",
        }
    }

    fn default_categories(self) -> (&'static str, &'static str) {
        match self {
            Template::RelativeDirection => ("PEDESTRIAN", "REGULAR_VEHICLE"),
            Template::Crossing => ("REGULAR_VEHICLE", "PEDESTRIAN"),
            Template::Facing => ("PEDESTRIAN", "BUS"),
            Template::HeadingToward => ("REGULAR_VEHICLE", "BICYCLIST"),
            Template::Near => ("BUS", "BICYCLIST"),
            Template::BrakingSequence => ("REGULAR_VEHICLE", "REGULAR_VEHICLE"),
            Template::Compound => ("REGULAR_VEHICLE", "PEDESTRIAN"),
        }
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Template parameters. Anything left `None` is drawn from the seed; the
/// manifest records the resolved values.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ScenarioParams {
    pub num_frames: Option<usize>,
    /// First frame of the relation window (inclusive).
    pub start_frame: Option<usize>,
    /// Last frame of the relation window (inclusive).
    pub end_frame: Option<usize>,
    pub track_category: Option<String>,
    pub related_category: Option<String>,
    pub direction: Option<Direction>,
    /// Template-specific separation, meters.
    pub distance: Option<f64>,
    /// Braking deceleration, m/s^2.
    pub decel: Option<f64>,
    /// Maximum cue-to-braking gap, seconds.
    pub window_seconds: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScenarioSpec {
    pub template: Template,
    #[cfg_attr(feature = "serde", serde(default))]
    pub params: ScenarioParams,
    #[cfg_attr(feature = "serde", serde(default = "default_distractors"))]
    pub n_distractors: usize,
    pub seed: u64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub log_id: Option<String>,
}

#[cfg(feature = "serde")]
fn default_distractors() -> usize {
    3
}

impl ScenarioSpec {
    pub fn new(template: Template, seed: u64) -> Self {
        Self {
            template,
            params: ScenarioParams::default(),
            n_distractors: 3,
            seed,
            log_id: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("infeasible spec: {0}")]
    InfeasibleSpec(String),
    #[error("generated log failed certification: {0}")]
    CertificationFailed(String),
    #[error(transparent)]
    Log(#[from] TrackLogError),
}

fn infeasible(msg: impl Into<String>) -> SynthError {
    SynthError::InfeasibleSpec(msg.into())
}

/// Certified record of a generated log.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Manifest {
    pub template: Template,
    /// Seed that resolved the parameters.
    pub seed: u64,
    /// Seed that drove placement, distractors and ids.
    pub layout_seed: u64,
    pub negative: bool,
    pub params: ScenarioParams,
    pub query_text: String,
    /// Program whose result certified the ground truth.
    pub program: String,
    /// Same program with the two candidate roles exchanged.
    pub role_swapped_program: String,
    pub gt_pairs: ScenarioSet,
    pub log_sha256: String,
    pub gt_sha256: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedScenario {
    pub log: TrackLog,
    pub ground_truth: GroundTruthScenario,
    pub manifest: Manifest,
}

/// Fully resolved parameters.
#[derive(Clone, Debug)]
struct Resolved {
    frames: usize,
    start: usize,
    end: usize,
    track: String,
    related: String,
    direction: Direction,
    distance: f64,
    decel: f64,
    window_seconds: f64,
}

impl Resolved {
    fn to_params(&self) -> ScenarioParams {
        ScenarioParams {
            num_frames: Some(self.frames),
            start_frame: Some(self.start),
            end_frame: Some(self.end),
            track_category: Some(self.track.clone()),
            related_category: Some(self.related.clone()),
            direction: Some(self.direction),
            distance: Some(self.distance),
            decel: Some(self.decel),
            window_seconds: Some(self.window_seconds),
        }
    }
}

/// Feasible separation range per template, meters.
fn distance_range(t: Template) -> (f64, f64) {
    match t {
        // has_objects_in_relative_direction within 50 m, 20% margin
        Template::RelativeDirection => (6.0, 40.0),
        // being_crossed_by forward_extent 10 m
        Template::Crossing => (2.0, 8.0),
        // facing_toward / heading_toward max_distance 50 m
        Template::Facing | Template::HeadingToward => (8.0, 40.0),
        // near_objects distance_thresh 10 m
        Template::Near => (2.0, 8.0),
        // lead gap, within_distance 30 m in the program
        Template::BrakingSequence => (8.0, 20.0),
        // within_distance 15 m in the program
        Template::Compound => (3.0, 10.0),
    }
}

fn resolve(spec: &ScenarioSpec, categories: &CategoryRegistry, rng: &mut ChaCha8Rng) -> Result<Resolved, SynthError> {
    let t = spec.template;
    let p = &spec.params;
    let frames = p.num_frames.unwrap_or(40);
    if frames < 2 {
        return Err(infeasible(format!("num_frames = {frames}; a log needs at least 2 frames")));
    }
    if frames > MAX_FRAMES {
        return Err(infeasible(format!("num_frames = {frames} exceeds {MAX_FRAMES}")));
    }
    let min_frames = match t {
        Template::BrakingSequence | Template::Compound => 20,
        _ => 10,
    };
    if frames < min_frames {
        return Err(infeasible(format!("template {t} needs at least {min_frames} frames, got {frames}")));
    }
    if spec.n_distractors > MAX_DISTRACTORS {
        return Err(infeasible(format!("n_distractors = {} exceeds {MAX_DISTRACTORS}", spec.n_distractors)));
    }
    let (dt, dr) = t.default_categories();
    let track = p.track_category.clone().unwrap_or_else(|| dt.into());
    let related = p.related_category.clone().unwrap_or_else(|| dr.into());
    for c in [&track, &related] {
        if !categories.contains(c) {
            return Err(infeasible(format!("unknown category `{c}`")));
        }
    }
    if t == Template::BrakingSequence && track != related {
        return Err(infeasible("braking_sequence uses one category for both vehicles"));
    }
    if t != Template::BrakingSequence && track == related {
        return Err(infeasible(format!("template {t} needs distinct track and related categories")));
    }
    let direction = match (t, p.direction) {
        (Template::RelativeDirection | Template::Crossing | Template::Compound, Some(d)) => d,
        (Template::RelativeDirection, None) => Direction::ALL[rng.random_range(0..4)],
        (Template::Compound, None) => {
            if rng.random_bool(0.5) {
                Direction::Left
            } else {
                Direction::Right
            }
        }
        (_, Some(d)) if d != Direction::Forward => {
            return Err(infeasible(format!("template {t} has no direction parameter")));
        }
        _ => Direction::Forward,
    };
    let (dmin, dmax) = distance_range(t);
    let distance = match p.distance {
        Some(d) if !(dmin..=dmax).contains(&d) => {
            return Err(infeasible(format!(
                "distance {d} outside the feasible range [{dmin}, {dmax}] for template {t}"
            )))
        }
        Some(d) => d,
        None => rng.random_range(dmin..dmax),
    };
    let decel = p.decel.unwrap_or(6.0);
    if t == Template::BrakingSequence && !(4.8..=9.0).contains(&decel) {
        return Err(infeasible(format!("decel {decel} must lie in [4.8, 9] m/s^2")));
    }
    let window_seconds = p.window_seconds.unwrap_or(3.0);
    if !(window_seconds > 0.0 && window_seconds <= 30.0) {
        return Err(infeasible(format!("window_seconds {window_seconds} must lie in (0, 30]")));
    }

    // relation window
    let last = frames - 1;
    let start = match p.start_frame {
        Some(s) => s,
        None => rng.random_range(2..=(frames / 4).max(2)),
    };
    let end = match p.end_frame {
        Some(e) => e,
        None if t == Template::BrakingSequence => (start + rng.random_range(3..=8)).min(last),
        None => {
            let lo = (start + 4).min(last);
            let hi = (last.saturating_sub(frames / 5)).max(lo);
            rng.random_range(lo..=hi)
        }
    };
    if start > end || end > last {
        return Err(infeasible(format!("relation window [{start}, {end}] does not fit in {frames} frames")));
    }
    let min_len = match t {
        Template::Crossing => 4,
        Template::BrakingSequence => 3,
        _ => 1,
    };
    if end - start + 1 < min_len {
        return Err(infeasible(format!("template {t} needs a window of at least {min_len} frames")));
    }
    if t == Template::Compound && (start == 0 || end + 1 > last) {
        return Err(infeasible("compound needs frames before and after the stop window"));
    }
    if t == Template::BrakingSequence {
        if start == 0 {
            return Err(infeasible("braking_sequence needs frames before the cue"));
        }
        let braking = end - start;
        let v0 = BRAKING_V0;
        if braking as f64 * decel * DT > v0 * 0.75 {
            return Err(infeasible("braking window too long; the follower would stop"));
        }
        if (braking as f64) * DT > window_seconds {
            return Err(infeasible("braking lasts longer than window_seconds"));
        }
    }
    Ok(Resolved {
        frames,
        start,
        end,
        track,
        related,
        direction,
        distance,
        decel,
        window_seconds,
    })
}

const BRAKING_V0: f64 = 12.0;

#[derive(Clone, Copy, Debug)]
struct Local {
    x: f64,
    y: f64,
    heading: f64,
    speed: f64,
}

#[derive(Clone, Debug)]
struct Cast {
    category: String,
    frames: Vec<Option<Local>>,
}

impl Cast {
    fn new(category: &str, n: usize) -> Self {
        Self {
            category: category.into(),
            frames: vec![None; n],
        }
    }

    /// Constant velocity along `heading`; `(x, y)` is the position at frame 0.
    fn cruise(mut self, range: core::ops::RangeInclusive<usize>, x: f64, y: f64, heading: f64, speed: f64) -> Self {
        for f in range {
            let s = speed * DT * f as f64;
            self.frames[f] = Some(Local {
                x: x + s * math::cos(heading),
                y: y + s * math::sin(heading),
                heading,
                speed,
            });
        }
        self
    }
}

/// Unit vector of a direction in a frame whose heading is 0.
fn axis(d: Direction) -> (f64, f64) {
    match d {
        Direction::Forward => (1.0, 0.0),
        Direction::Backward => (-1.0, 0.0),
        Direction::Left => (0.0, 1.0),
        Direction::Right => (0.0, -1.0),
    }
}

fn opposite(d: Direction) -> Direction {
    match d {
        Direction::Forward => Direction::Backward,
        Direction::Backward => Direction::Forward,
        Direction::Left => Direction::Right,
        Direction::Right => Direction::Left,
    }
}

fn box_dims(category: &str) -> [f64; 3] {
    match category {
        "PEDESTRIAN" => [0.6, 0.6, 1.7],
        "REGULAR_VEHICLE" => [4.6, 1.9, 1.5],
        "TRUCK" => [8.0, 2.5, 3.2],
        "BUS" => [12.0, 2.6, 3.2],
        "BICYCLIST" => [1.8, 0.6, 1.7],
        "MOTORCYCLIST" => [2.2, 0.8, 1.6],
        "EGO_VEHICLE" => [4.8, 2.0, 1.6],
        _ => [2.0, 1.0, 1.5],
    }
}

fn human(category: &str) -> String {
    category.to_lowercase().replace('_', " ")
}

fn with_article(noun: &str) -> String {
    let vowel = noun.starts_with(|c: char| "aeiou".contains(c));
    format!("{} {noun}", if vowel { "an" } else { "a" })
}

fn direction_phrase(d: Direction) -> &'static str {
    match d {
        Direction::Forward => "in front of",
        Direction::Backward => "behind",
        Direction::Left => "to the left of",
        Direction::Right => "to the right of",
    }
}

/// Natural-language query for a resolved template.
fn query_text(t: Template, r: &Resolved) -> String {
    let track = human(&r.track);
    let related = human(&r.related);
    match t {
        Template::RelativeDirection => format!(
            "{} {} {}",
            with_article(&related),
            direction_phrase(r.direction),
            with_article(&track)
        ),
        Template::Crossing => {
            let side = match r.direction {
                Direction::Forward => "in front of".to_string(),
                Direction::Backward => "behind".to_string(),
                d => format!("the {} side of", d.as_str()),
            };
            format!("{} crossing {side} {}", with_article(&related), with_article(&track))
        }
        Template::Facing => format!("{} facing toward {}", with_article(&track), with_article(&related)),
        Template::HeadingToward => format!("{} heading toward {}", with_article(&track), with_article(&related)),
        Template::Near => format!("{} near {}", with_article(&track), with_article(&related)),
        Template::BrakingSequence => format!(
            "{} braking hard shortly after another {track} appears in front of it",
            with_article(&track)
        ),
        Template::Compound => {
            let side = match r.direction {
                Direction::Forward => "in front of it",
                Direction::Backward => "behind it",
                Direction::Left => "on its left",
                Direction::Right => "on its right",
            };
            format!("a stopped {track} with {} {side}", with_article(&related))
        }
    }
}

fn var_name(category: &str) -> String {
    format!("{}s", category.to_lowercase())
}

/// Canonical program and its candidate-role-swapped variant.
fn programs(t: Template, r: &Resolved) -> (String, String) {
    let tv = var_name(&r.track);
    let rv = var_name(&r.related);
    let mut head = format!("{tv} = get_objects_of_category(category=\"{}\")\n", r.track);
    if rv != tv {
        head.push_str(&format!("{rv} = get_objects_of_category(category=\"{}\")\n", r.related));
    }
    let relation = |func: &str, a: &str, b: &str, extra: &str| -> String {
        format!("{head}hit = {func}(track_candidates={a}, related_candidates={b}{extra})\noutput(hit)\n")
    };
    let dir = format!(", direction=\"{}\"", r.direction);
    match t {
        Template::RelativeDirection => (
            relation("has_objects_in_relative_direction", &tv, &rv, &dir),
            relation("has_objects_in_relative_direction", &rv, &tv, &dir),
        ),
        Template::Crossing => (
            relation("being_crossed_by", &tv, &rv, &dir),
            relation("being_crossed_by", &rv, &tv, &dir),
        ),
        Template::Facing => (relation("facing_toward", &tv, &rv, ""), relation("facing_toward", &rv, &tv, "")),
        Template::HeadingToward => (relation("heading_toward", &tv, &rv, ""), relation("heading_toward", &rv, &tv, "")),
        Template::Near => (relation("near_objects", &tv, &rv, ""), relation("near_objects", &rv, &tv, "")),
        Template::BrakingSequence => {
            let body = format!(
                "{head}lead_ahead = has_objects_in_relative_direction(track_candidates={tv}, related_candidates={tv}, direction=\"forward\", within_distance=30)\n\
                 braking = decelerating(track_candidates={tv}, min_decel=4)\n"
            );
            let w = r.window_seconds;
            (
                format!("{body}hit = followed_by(first=lead_ahead, second=braking, within_seconds={w})\noutput(hit)\n"),
                format!("{body}hit = followed_by(first=braking, second=lead_ahead, within_seconds={w})\noutput(hit)\n"),
            )
        }
        Template::Compound => {
            let side = |a: &str, b: &str| {
                format!(
                    "{head}stopped = has_velocity(track_candidates={tv}, max_velocity=0.5)\n\
                     beside = has_objects_in_relative_direction(track_candidates={a}, related_candidates={b}, direction=\"{}\", within_distance=15)\n\
                     hit = scenario_and(stopped, beside)\noutput(hit)\n",
                    r.direction
                )
            };
            (side(&tv, &rv), side(&rv, &tv))
        }
    }
}

/// Local layout of the primary cast. Index 0 is always the track candidate
/// whose pairs form the ground truth; the returned frames are those pairs.
fn layout(t: Template, r: &Resolved, negative: bool, rng: &mut ChaCha8Rng) -> (Vec<Cast>, Vec<usize>) {
    let n = r.frames;
    let last = n - 1;
    let window: Vec<usize> = (r.start..=r.end).collect();
    match t {
        Template::RelativeDirection => {
            let speed = if r.track == "PEDESTRIAN" { 1.3 } else { rng.random_range(0.0..10.0) };
            let subject = Cast::new(&r.track, n).cruise(0..=last, 0.0, 0.0, 0.0, speed);
            // off-axis jitter keeps the bearing within 0.3 of the 0.785 cone edge
            let jitter = rng.random_range(-0.3..0.3) * r.distance;
            let dir = if negative { opposite(r.direction) } else { r.direction };
            let (ax, ay) = axis(dir);
            let (ox, oy) = (ax * r.distance - ay * jitter, ay * r.distance + ax * jitter);
            let related = Cast::new(&r.related, n).cruise(r.start..=r.end, ox, oy, 0.0, speed);
            (vec![subject, related], if negative { vec![] } else { window })
        }
        Template::Crossing => {
            let subject = Cast::new(&r.track, n).cruise(0..=last, 0.0, 0.0, 0.0, 0.0);
            let (ax, ay) = axis(r.direction);
            // orthogonal unit vector
            let (px, py) = (-ay, ax);
            let steps = (r.end - r.start) as f64;
            let c0 = 3.0;
            let along = if negative { 12.0 + r.distance } else { r.distance };
            // half-step offset so no frame lands exactly on the axis
            let step = 2.0 * c0 / (steps + 0.5);
            let mut related = Cast::new(&r.related, n);
            let mut cross = Vec::new();
            for f in r.start..=r.end {
                let c = c0 - step * (f - r.start) as f64;
                cross.push(c);
                related.frames[f] = Some(Local {
                    x: ax * along + px * c,
                    y: ay * along + py * c,
                    heading: math::atan2(-py, -px),
                    speed: step / DT,
                });
            }
            let mut gt = Vec::new();
            if !negative {
                for (k, w) in cross.windows(2).enumerate() {
                    if w[0] * w[1] <= 0.0 {
                        gt.push(r.start + k);
                        gt.push(r.start + k + 1);
                    }
                }
            }
            (vec![subject, related], gt)
        }
        Template::Facing => {
            let bearing = rng.random_range(-0.3..0.3);
            let heading = if negative { bearing + FRAC_PI_2 } else { bearing };
            let subject = Cast::new(&r.track, n).cruise(0..=last, 0.0, 0.0, heading, 0.0);
            let (rx, ry) = (r.distance, 0.0);
            // related faces across the line of sight
            let related = Cast::new(&r.related, n).cruise(r.start..=r.end, rx, ry, FRAC_PI_2, 0.0);
            (vec![subject, related], if negative { vec![] } else { window })
        }
        Template::HeadingToward => {
            let speed = rng.random_range(4.0..12.0);
            let subject = Cast::new(&r.track, n).cruise(0..=last, 0.0, 0.0, 0.0, speed);
            let angle = if negative { FRAC_PI_2 } else { rng.random_range(-0.3..0.3) };
            let (ox, oy) = (r.distance * math::cos(angle), r.distance * math::sin(angle));
            let related = Cast::new(&r.related, n).cruise(r.start..=r.end, ox, oy, 0.0, speed);
            (vec![subject, related], if negative { vec![] } else { window })
        }
        Template::Near => {
            let subject = Cast::new(&r.track, n).cruise(0..=last, 0.0, 0.0, 0.0, 0.0);
            let angle = rng.random_range(-PI..PI);
            let d = if negative { 12.0 + 2.0 * r.distance } else { r.distance };
            let related = Cast::new(&r.related, n).cruise(
                r.start..=r.end,
                d * math::cos(angle),
                d * math::sin(angle),
                angle,
                0.0,
            );
            (vec![subject, related], if negative { vec![] } else { window })
        }
        Template::BrakingSequence => {
            // the lead appears at frame `cue`; the follower brakes over
            // frames (brake_start, brake_end]
            let cue = r.start;
            let braking_frames = r.end - r.start;
            let (brake_start, lead_from, lead_gap_frame) = if negative {
                // braking finishes before the lead ever appears
                (0usize, last - 2, last - 2)
            } else {
                (cue, cue, cue)
            };
            let brake_end = brake_start + braking_frames;
            let mut follower = Cast::new(&r.track, n);
            let mut x = 0.0;
            let mut v_prev = BRAKING_V0;
            for f in 0..=last {
                let v = if f <= brake_start {
                    BRAKING_V0
                } else if f <= brake_end {
                    BRAKING_V0 - r.decel * DT * (f - brake_start) as f64
                } else {
                    BRAKING_V0 - r.decel * DT * braking_frames as f64
                };
                if f > 0 {
                    x += DT * (v_prev + v) / 2.0;
                }
                v_prev = v;
                follower.frames[f] = Some(Local { x, y: 0.0, heading: 0.0, speed: v });
            }
            let gap_x = follower.frames[lead_gap_frame].unwrap().x + r.distance;
            let lead = Cast::new(&r.track, n).cruise(
                lead_from..=last,
                gap_x - BRAKING_V0 * DT * lead_gap_frame as f64,
                0.0,
                0.0,
                BRAKING_V0,
            );
            let gt = if negative { vec![] } else { (brake_start + 1..=brake_end).collect() };
            (vec![follower, lead], gt)
        }
        Template::Compound => {
            // stopped over [start, end], driving before and after
            let drive = 8.0;
            let mut subject = Cast::new(&r.track, n);
            let mut x = 0.0;
            for f in 0..=last {
                let moving = f < r.start || f > r.end;
                let speed = if moving || negative { drive } else { 0.0 };
                if f > 0 && (speed > 0.0) {
                    x += drive * DT;
                }
                subject.frames[f] = Some(Local { x, y: 0.0, heading: 0.0, speed });
            }
            let stop_x = subject.frames[r.start].unwrap().x;
            let (ax, ay) = axis(r.direction);
            let jitter = rng.random_range(-0.25..0.25) * r.distance;
            let (ox, oy) = (stop_x + ax * r.distance - ay * jitter, ay * r.distance + ax * jitter);
            let related_to = (r.end + 3).min(last);
            let related = Cast::new(&r.related, n).cruise(r.start..=related_to, ox, oy, 0.0, 0.0);
            let gt = if negative { vec![] } else { window };
            (vec![subject, related], gt)
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    const DIGITS: &[u8; 16] = b"0123456789abcdef";
    bytes
        .iter()
        .flat_map(|b| [DIGITS[(b >> 4) as usize] as char, DIGITS[(b & 15) as usize] as char])
        .collect()
}

fn track_id(rng: &mut ChaCha8Rng) -> String {
    let a: u64 = rng.random();
    let b: u64 = rng.random();
    let s = hex(&[a.to_be_bytes(), b.to_be_bytes()].concat());
    format!("{}-{}-{}-{}-{}", &s[0..8], &s[8..12], &s[12..16], &s[16..20], &s[20..32])
}

/// SHA-256 over a canonical byte encoding of the log.
pub fn log_digest(log: &TrackLog) -> String {
    let mut h = Sha256::new();
    h.update(log.log_id().as_bytes());
    h.update([0]);
    for t in log.timestamps() {
        h.update(t.to_le_bytes());
    }
    for obj in log.objects() {
        h.update(obj.track_id.as_bytes());
        h.update([0]);
        h.update(obj.category.as_str().as_bytes());
        h.update([0]);
        for (t, s) in &obj.states {
            h.update(t.to_le_bytes());
            for v in s.position.iter().chain(&s.velocity).chain(&s.box_dims).chain([&s.heading]) {
                h.update(v.to_bits().to_le_bytes());
            }
        }
    }
    hex(&h.finalize())
}

/// SHA-256 over the `(track, timestamp)` pairs of a scenario set.
pub fn scenario_digest(set: &ScenarioSet) -> String {
    let mut h = Sha256::new();
    for (id, t) in set.pairs() {
        h.update(id.as_bytes());
        h.update([0]);
        h.update(t.to_le_bytes());
    }
    hex(&h.finalize())
}

struct Built {
    log: TrackLog,
    gt: ScenarioSet,
    resolved: Resolved,
}

fn build(spec: &ScenarioSpec, registry: &Registry, negative: bool, layout_seed: u64) -> Result<Built, SynthError> {
    let resolved = resolve(spec, registry.categories(), &mut ChaCha8Rng::seed_from_u64(spec.seed))?;
    let mut rng = ChaCha8Rng::seed_from_u64(layout_seed);
    let mut layout_rng = ChaCha8Rng::seed_from_u64(layout_seed ^ 0x5eed_1a70_u64);
    let (mut cast, gt_frames) = layout(spec.template, &resolved, negative, &mut layout_rng);

    // distractors on a ring outside everything else
    let mut reach: f64 = 0.0;
    for c in &cast {
        for l in c.frames.iter().flatten() {
            reach = reach.max(math::hypot(l.x, l.y));
        }
    }
    let k = spec.n_distractors;
    let ring = reach + DISTRACTOR_CLEARANCE + DISTRACTOR_CLEARANCE * k as f64 / PI;
    let names: Vec<&str> = registry.categories().names().collect();
    let n = resolved.frames;
    for i in 0..k {
        let angle = 2.0 * PI * i as f64 / k as f64 + rng.random_range(0.0..0.2);
        let radius = ring + rng.random_range(0.0..10.0);
        let category = names[rng.random_range(0..names.len())];
        let from = rng.random_range(0..n / 2);
        let to = rng.random_range(n / 2..n);
        let heading = rng.random_range(-PI..PI);
        cast.push(Cast::new(category, n).cruise(
            from..=to,
            radius * math::cos(angle),
            radius * math::sin(angle),
            heading,
            0.0,
        ));
    }

    // rigid transform into the log frame
    let theta = rng.random_range(-PI..PI);
    let (tx, ty) = (rng.random_range(-500.0..500.0), rng.random_range(-500.0..500.0));
    let (s, c) = (math::sin(theta), math::cos(theta));
    let timestamps: Vec<Timestamp> = (0..n).map(|f| BASE_TIMESTAMP + FRAME_NANOS * f as i64).collect();
    let mut ids = Vec::with_capacity(cast.len());
    let mut objects = Vec::with_capacity(cast.len());
    for member in &cast {
        let id = track_id(&mut rng);
        let category: ObjectCategory = registry
            .categories()
            .resolve(&member.category)
            .map_err(|e| infeasible(format!("{e}")))?;
        let dims = box_dims(&member.category);
        let mut states = BTreeMap::new();
        for (f, l) in member.frames.iter().enumerate() {
            let Some(l) = l else { continue };
            let heading = math::wrap_angle(l.heading + theta);
            let (hx, hy) = (math::cos(heading), math::sin(heading));
            states.insert(
                timestamps[f],
                ObjectState {
                    position: [c * l.x - s * l.y + tx, s * l.x + c * l.y + ty, 0.0],
                    heading,
                    velocity: [l.speed * hx, l.speed * hy, 0.0],
                    box_dims: dims,
                },
            );
        }
        ids.push(id.clone());
        objects.push(TrackedObject { track_id: id, category, states });
    }
    let log_id = spec.log_id.clone().unwrap_or_else(|| {
        let base = format!("synth-{}-{:016x}", spec.template, spec.seed);
        if negative {
            format!("{base}-neg-{layout_seed:016x}")
        } else {
            base
        }
    });
    let log = TrackLog::new(log_id, timestamps.clone(), objects)?;
    let mut gt = ScenarioSet::new();
    for f in gt_frames {
        gt.insert(&ids[0], timestamps[f]);
    }
    Ok(Built { log, gt, resolved })
}

fn certify(program: &str, log: &TrackLog, registry: &Registry, expected: &ScenarioSet) -> Result<(), SynthError> {
    let got = dsl::run(program, log, registry).map_err(|e| SynthError::CertificationFailed(format!("{e}")))?;
    if &got != expected {
        return Err(SynthError::CertificationFailed(format!(
            "program returned {} pairs, layout expects {}",
            got.len(),
            expected.len()
        )));
    }
    Ok(())
}

fn generate(
    spec: &ScenarioSpec,
    registry: &Registry,
    negative: bool,
    layout_seed: u64,
) -> Result<GeneratedScenario, SynthError> {
    let Built { log, gt, resolved } = build(spec, registry, negative, layout_seed)?;
    let (program, role_swapped_program) = programs(spec.template, &resolved);
    certify(&program, &log, registry, &gt)?;
    let query = query_text(spec.template, &resolved);
    let ground_truth = GroundTruthScenario::new(query.clone(), &log, gt.clone())?;
    let manifest = Manifest {
        template: spec.template,
        seed: spec.seed,
        layout_seed,
        negative,
        params: resolved.to_params(),
        query_text: query,
        program,
        role_swapped_program,
        log_sha256: log_digest(&log),
        gt_sha256: scenario_digest(&gt),
        gt_pairs: gt,
    };
    Ok(GeneratedScenario { log, ground_truth, manifest })
}

/// A log in which the templated relation holds for exactly the manifest
/// pairs.
pub fn generate_scenario_log(spec: &ScenarioSpec, registry: &Registry) -> Result<GeneratedScenario, SynthError> {
    generate(spec, registry, false, spec.seed)
}

/// A log with the same cast and parameters in which the templated relation
/// never holds. `seed` drives the layout; parameters still resolve from the
/// spec's own seed, so the query matches the positive log's.
pub fn generate_negative_log(spec: &ScenarioSpec, seed: u64, registry: &Registry) -> Result<GeneratedScenario, SynthError> {
    generate(spec, registry, true, seed)
}

/// Template variants with pairwise-distinct queries, cycled to `count`
/// specs. Seeds derive from `base_seed`.
pub fn corpus_specs(count: usize, base_seed: u64) -> Vec<ScenarioSpec> {
    use Direction::*;
    use Template::*;
    const V: &str = "REGULAR_VEHICLE";
    const P: &str = "PEDESTRIAN";
    let table: &[(Template, &str, &str, Option<Direction>)] = &[
        (RelativeDirection, P, V, Some(Forward)),
        (Crossing, V, P, Some(Forward)),
        (Facing, P, "BUS", None),
        (HeadingToward, V, "BICYCLIST", None),
        (Near, "BUS", "BICYCLIST", None),
        (BrakingSequence, V, V, None),
        (Compound, V, P, Some(Left)),
        (RelativeDirection, V, P, Some(Forward)),
        (Crossing, "BUS", P, Some(Forward)),
        (Facing, P, V, None),
        (HeadingToward, "TRUCK", P, None),
        (Near, V, "MOTORCYCLIST", None),
        (BrakingSequence, "TRUCK", "TRUCK", None),
        (Compound, V, P, Some(Right)),
        (RelativeDirection, "BICYCLIST", "TRUCK", Some(Left)),
        (Crossing, V, "BICYCLIST", Some(Backward)),
        (Facing, "BICYCLIST", "TRUCK", None),
        (HeadingToward, "BUS", V, None),
        (Near, P, "TRUCK", None),
        (BrakingSequence, "BUS", "BUS", None),
        (Compound, "TRUCK", "BICYCLIST", Some(Left)),
        (RelativeDirection, P, "BUS", Some(Right)),
        (Crossing, "TRUCK", V, Some(Forward)),
        (Facing, "MOTORCYCLIST", P, None),
        (HeadingToward, "MOTORCYCLIST", "BUS", None),
        (Near, "EGO_VEHICLE", P, None),
        (BrakingSequence, "MOTORCYCLIST", "MOTORCYCLIST", None),
        (Compound, "BUS", P, Some(Right)),
        (RelativeDirection, V, "MOTORCYCLIST", Some(Backward)),
        (Crossing, "EGO_VEHICLE", P, Some(Left)),
        (Facing, V, "EGO_VEHICLE", None),
        (HeadingToward, V, P, None),
        (Near, "TRUCK", V, None),
        (Compound, "EGO_VEHICLE", "BICYCLIST", Some(Left)),
        (RelativeDirection, "TRUCK", "EGO_VEHICLE", Some(Forward)),
    ];
    (0..count)
        .map(|i| {
            let (template, track, related, direction) = table[i % table.len()];
            let mut spec = ScenarioSpec::new(template, base_seed.wrapping_add(i as u64 * 7919));
            spec.params.track_category = Some(track.into());
            spec.params.related_category = Some(related.into());
            spec.params.direction = direction;
            spec
        })
        .collect()
}
