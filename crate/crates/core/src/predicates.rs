//! The atomic scenario functions that query programs compose.
//!
//! Every relational predicate takes `track` candidates and `related`
//! candidates as [`ScenarioSet`]s. Results are always a subset of the
//! `track` argument: a `(track_id, timestamp)` pair survives when the
//! relation, measured from the track candidate's own frame, holds at that
//! timestamp. Self-pairs are skipped and all threshold comparisons are
//! inclusive.

// `!(x >= 0.0)` checks also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use crate::category::{CategoryError, ObjectCategory};
use crate::geometry::{
    self, Direction, GeometryError, DEFAULT_LAT_HALF_ANGLE, DEFAULT_LONG_HALF_ANGLE,
};
use crate::math::{self, FRAC_PI_4};
use crate::scenario::ScenarioSet;
use crate::tracklog::{ObjectState, Timestamp, TrackLog};
use crate::NANOS_PER_SECOND;

/// Speed below which a velocity direction is considered undefined.
pub const MIN_HEADING_SPEED: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PredicateError {
    #[error(transparent)]
    UnknownCategory(#[from] CategoryError),
    #[error("{function}: invalid parameter {parameter}: {reason}")]
    InvalidParameter {
        function: &'static str,
        parameter: &'static str,
        reason: String,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn invalid(function: &'static str, parameter: &'static str, reason: impl Into<String>) -> PredicateError {
    PredicateError::InvalidParameter {
        function,
        parameter,
        reason: reason.into(),
    }
}

/// Relative travel direction for [`heading_in_relative_direction_to`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RelativeHeading {
    Same,
    Opposite,
    Perpendicular,
}

impl RelativeHeading {
    pub const ALL: [RelativeHeading; 3] = [
        RelativeHeading::Same,
        RelativeHeading::Opposite,
        RelativeHeading::Perpendicular,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelativeHeading::Same => "same",
            RelativeHeading::Opposite => "opposite",
            RelativeHeading::Perpendicular => "perpendicular",
        }
    }

    /// Whether an angle between two travel directions, in `[0, pi]`, falls
    /// in this bin. The bins partition `[0, pi]`.
    pub fn admits(self, angle: f64) -> bool {
        match self {
            RelativeHeading::Same => angle < FRAC_PI_4,
            RelativeHeading::Opposite => angle > 3.0 * FRAC_PI_4,
            RelativeHeading::Perpendicular => {
                math::abs(angle - core::f64::consts::FRAC_PI_2) <= FRAC_PI_4
            }
        }
    }
}

impl fmt::Display for RelativeHeading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelativeHeading {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelativeHeading::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or(())
    }
}

fn state_at<'a>(log: &'a TrackLog, track_id: &str, t: Timestamp) -> Option<&'a ObjectState> {
    log.object(track_id).and_then(|o| o.states.get(&t))
}

/// Keeps each `(track, t)` pair for which `keep` holds, given the track's
/// state at `t`.
fn filter_track<F>(log: &TrackLog, track: &ScenarioSet, mut keep: F) -> ScenarioSet
where
    F: FnMut(&str, Timestamp, &ObjectState) -> bool,
{
    let mut out = ScenarioSet::new();
    for (id, t) in track.pairs() {
        if let Some(state) = state_at(log, id, t) {
            if keep(id, t, state) {
                out.insert(id, t);
            }
        }
    }
    out
}

/// Related candidates other than `track_id` present at `t`, with their state.
fn related_at<'a>(
    log: &'a TrackLog,
    related: &'a ScenarioSet,
    track_id: &'a str,
    t: Timestamp,
) -> impl Iterator<Item = (&'a str, &'a ObjectState)> + 'a {
    related
        .tracks()
        .filter(move |(id, ts)| *id != track_id && ts.contains(&t))
        .filter_map(move |(id, _)| state_at(log, id, t).map(|s| (id, s)))
}

fn positive(function: &'static str, parameter: &'static str, value: f64) -> Result<(), PredicateError> {
    if value > 0.0 && !value.is_nan() {
        Ok(())
    } else {
        Err(invalid(function, parameter, format!("must be > 0, got {value}")))
    }
}

/// Every object of `category`, over its whole lifespan.
pub fn get_objects_of_category(log: &TrackLog, category: &ObjectCategory) -> ScenarioSet {
    let mut out = ScenarioSet::new();
    for obj in log.objects().iter().filter(|o| &o.category == category) {
        out.insert_track(&obj.track_id, obj.states.keys().copied());
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeDirectionParams {
    pub direction: Direction,
    pub min_number: u64,
    /// `u64::MAX` means unbounded.
    pub max_number: u64,
    pub within_distance: f64,
    /// Bound on the offset orthogonal to `direction`.
    pub lateral_thresh: f64,
}

impl RelativeDirectionParams {
    pub fn new(direction: Direction) -> Self {
        Self {
            direction,
            min_number: 1,
            max_number: u64::MAX,
            within_distance: 50.0,
            lateral_thresh: f64::INFINITY,
        }
    }
}

/// Keeps track candidates that see between `min_number` and `max_number`
/// related candidates in `direction`, measured in the track candidate's
/// frame.
pub fn has_objects_in_relative_direction(
    log: &TrackLog,
    track: &ScenarioSet,
    related: &ScenarioSet,
    p: &RelativeDirectionParams,
) -> Result<ScenarioSet, PredicateError> {
    const F: &str = "has_objects_in_relative_direction";
    if p.min_number < 1 {
        return Err(invalid(F, "min_number", "must be >= 1"));
    }
    if p.min_number > p.max_number {
        return Err(invalid(F, "max_number", "must be >= min_number"));
    }
    positive(F, "within_distance", p.within_distance)?;
    if !(p.lateral_thresh >= 0.0) {
        return Err(invalid(F, "lateral_thresh", "must be >= 0"));
    }
    Ok(filter_track(log, track, |id, t, me| {
        let mut n: u64 = 0;
        for (_, other) in related_at(log, related, id, t) {
            let off = geometry::relative_offset(me, other);
            let dir = geometry::classify_direction(&off, DEFAULT_LONG_HALF_ANGLE, DEFAULT_LAT_HALF_ANGLE)
                .ok()
                .flatten();
            let (_, orthogonal) = off.axis_coordinates(p.direction);
            if dir == Some(p.direction)
                && off.distance <= p.within_distance
                && math::abs(orthogonal) <= p.lateral_thresh
            {
                n += 1;
            }
        }
        p.min_number <= n && n <= p.max_number
    }))
}

/// Keeps track candidates whose `direction` face is crossed by a related
/// candidate moving between two consecutive timestamps that include `t`.
pub fn being_crossed_by(
    log: &TrackLog,
    track: &ScenarioSet,
    related: &ScenarioSet,
    direction: Direction,
    lateral_band: f64,
    forward_extent: f64,
) -> Result<ScenarioSet, PredicateError> {
    const F: &str = "being_crossed_by";
    positive(F, "lateral_band", lateral_band)?;
    positive(F, "forward_extent", forward_extent)?;
    if !lateral_band.is_finite() || !forward_extent.is_finite() {
        return Err(invalid(F, "lateral_band", "thresholds must be finite"));
    }
    let mut result = Ok(());
    let out = filter_track(log, track, |id, t, me| {
        let windows = [
            log.prev_timestamp(t).map(|p| (p, t)),
            log.next_timestamp(t).map(|n| (t, n)),
        ];
        for (r_id, r_ts) in related.tracks().filter(|(r, _)| *r != id) {
            for (a, b) in windows.iter().flatten() {
                if !(r_ts.contains(a) && r_ts.contains(b)) {
                    continue;
                }
                let (Some(prev), Some(next)) = (state_at(log, r_id, *a), state_at(log, r_id, *b)) else {
                    continue;
                };
                match geometry::segment_crosses_front_plane(
                    me,
                    prev,
                    next,
                    direction,
                    lateral_band,
                    forward_extent,
                ) {
                    Ok(true) => return true,
                    Ok(false) => {}
                    Err(e) => {
                        result = Err(e.into());
                        return false;
                    }
                }
            }
        }
        false
    });
    result.map(|_| out)
}

/// Keeps track candidates travelling in the given relative direction to
/// some related candidate. Frames where either speed is below
/// [`MIN_HEADING_SPEED`] are skipped.
pub fn heading_in_relative_direction_to(
    log: &TrackLog,
    track: &ScenarioSet,
    related: &ScenarioSet,
    direction: RelativeHeading,
) -> ScenarioSet {
    filter_track(log, track, |id, t, me| {
        if me.planar_speed() < MIN_HEADING_SPEED {
            return false;
        }
        related_at(log, related, id, t).any(|(_, other)| {
            if other.planar_speed() < MIN_HEADING_SPEED {
                return false;
            }
            let (ax, ay) = (me.velocity[0], me.velocity[1]);
            let (bx, by) = (other.velocity[0], other.velocity[1]);
            let angle = math::atan2(math::abs(ax * by - ay * bx), ax * bx + ay * by);
            direction.admits(angle)
        })
    })
}

/// Keeps track candidates whose heading points at a related candidate
/// within `within_angle` and `max_distance`.
pub fn facing_toward(
    log: &TrackLog,
    track: &ScenarioSet,
    related: &ScenarioSet,
    within_angle: f64,
    max_distance: f64,
) -> Result<ScenarioSet, PredicateError> {
    const F: &str = "facing_toward";
    if !(within_angle > 0.0 && within_angle <= math::PI) {
        return Err(invalid(F, "within_angle", format!("must be in (0, pi], got {within_angle}")));
    }
    positive(F, "max_distance", max_distance)?;
    Ok(filter_track(log, track, |id, t, me| {
        related_at(log, related, id, t).any(|(_, other)| {
            let off = geometry::relative_offset(me, other);
            off.distance <= max_distance
                && geometry::bearing_angle(me, other).is_ok_and(|a| a <= within_angle)
        })
    }))
}

/// Like [`facing_toward`] but uses the velocity direction, and requires a
/// planar speed of at least `minimum_speed`.
pub fn heading_toward(
    log: &TrackLog,
    track: &ScenarioSet,
    related: &ScenarioSet,
    within_angle: f64,
    minimum_speed: f64,
    max_distance: f64,
) -> Result<ScenarioSet, PredicateError> {
    const F: &str = "heading_toward";
    if !(within_angle > 0.0 && within_angle <= math::PI) {
        return Err(invalid(F, "within_angle", format!("must be in (0, pi], got {within_angle}")));
    }
    positive(F, "minimum_speed", minimum_speed)?;
    positive(F, "max_distance", max_distance)?;
    Ok(filter_track(log, track, |id, t, me| {
        if me.planar_speed() < minimum_speed {
            return false;
        }
        related_at(log, related, id, t).any(|(_, other)| {
            let off = geometry::relative_offset(me, other);
            off.distance <= max_distance
                && geometry::velocity_bearing_angle(me, other).is_ok_and(|a| a <= within_angle)
        })
    }))
}

/// Keeps track candidates with at least `min_objects` related candidates
/// within `distance_thresh` (planar).
pub fn near_objects(
    log: &TrackLog,
    track: &ScenarioSet,
    related: &ScenarioSet,
    distance_thresh: f64,
    min_objects: u64,
) -> Result<ScenarioSet, PredicateError> {
    positive("near_objects", "distance_thresh", distance_thresh)?;
    Ok(filter_track(log, track, |id, t, me| {
        let n = related_at(log, related, id, t)
            .filter(|(_, other)| {
                math::hypot(
                    other.position[0] - me.position[0],
                    other.position[1] - me.position[1],
                ) <= distance_thresh
            })
            .count() as u64;
        n >= min_objects
    }))
}

/// Keeps pairs whose planar speed lies in `[min_velocity, max_velocity]`.
pub fn has_velocity(
    log: &TrackLog,
    track: &ScenarioSet,
    min_velocity: f64,
    max_velocity: f64,
) -> Result<ScenarioSet, PredicateError> {
    const F: &str = "has_velocity";
    if !(min_velocity >= 0.0) {
        return Err(invalid(F, "min_velocity", "must be >= 0"));
    }
    if !(max_velocity >= min_velocity) {
        return Err(invalid(F, "max_velocity", "must be >= min_velocity"));
    }
    Ok(filter_track(log, track, |_, _, me| {
        let v = me.planar_speed();
        min_velocity <= v && v <= max_velocity
    }))
}

/// Keeps pairs where planar speed dropped by at least `min_decel` m/s^2
/// since the previous log timestamp.
pub fn decelerating(
    log: &TrackLog,
    track: &ScenarioSet,
    min_decel: f64,
) -> Result<ScenarioSet, PredicateError> {
    positive("decelerating", "min_decel", min_decel)?;
    Ok(filter_track(log, track, |id, t, me| {
        let Some(prev_t) = log.prev_timestamp(t) else {
            return false;
        };
        let Some(prev) = state_at(log, id, prev_t) else {
            return false;
        };
        let dt = (t - prev_t) as f64 / NANOS_PER_SECOND as f64;
        (me.planar_speed() - prev.planar_speed()) / dt <= -min_decel
    }))
}

pub fn scenario_and(a: &ScenarioSet, b: &ScenarioSet) -> ScenarioSet {
    a.intersection(b)
}

pub fn scenario_or(a: &ScenarioSet, b: &ScenarioSet) -> ScenarioSet {
    a.union(b)
}

/// Pairs of `base` not in `s`.
pub fn scenario_not(base: &ScenarioSet, s: &ScenarioSet) -> ScenarioSet {
    base.difference(s)
}

/// Converts a window in seconds to whole nanoseconds.
pub fn seconds_to_nanos(seconds: f64) -> Timestamp {
    math::round(seconds * NANOS_PER_SECOND as f64) as Timestamp
}

/// Keeps pairs of `second` preceded by a `first` hit at most
/// `within_seconds` earlier (strictly earlier). With `cross_track` the
/// earlier hit may belong to any track; otherwise it must be the same one.
pub fn followed_by(
    first: &ScenarioSet,
    second: &ScenarioSet,
    within_seconds: f64,
    cross_track: bool,
) -> Result<ScenarioSet, PredicateError> {
    positive("followed_by", "within_seconds", within_seconds)?;
    if !within_seconds.is_finite() {
        return Err(invalid("followed_by", "within_seconds", "must be finite"));
    }
    let window = seconds_to_nanos(within_seconds);
    let pooled = cross_track.then(|| first.all_timestamps());
    let mut out = ScenarioSet::new();
    for (id, t) in second.pairs() {
        let earlier = match &pooled {
            Some(all) => Some(all),
            None => first.timestamps(id),
        };
        let hit = earlier.is_some_and(|ts| {
            ts.range(t.saturating_sub(window)..t).next().is_some()
        });
        if hit {
            out.insert(id, t);
        }
    }
    Ok(out)
}
