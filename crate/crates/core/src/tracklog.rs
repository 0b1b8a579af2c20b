//! Tracked-object logs and the ground truth attached to them.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::category::ObjectCategory;
use crate::math::{self, PI};
use crate::scenario::ScenarioSet;

/// Integer nanoseconds.
pub type Timestamp = i64;

/// Kinematic state of one object at one timestamp.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObjectState {
    /// Meters, log-global frame.
    pub position: [f64; 3],
    /// Yaw in radians, within (-pi, pi].
    pub heading: f64,
    /// Meters per second.
    pub velocity: [f64; 3],
    /// Length, width, height in meters.
    pub box_dims: [f64; 3],
}

impl ObjectState {
    pub fn validate(&self) -> Result<(), TrackLogError> {
        let finite = self
            .position
            .iter()
            .chain(self.velocity.iter())
            .chain(self.box_dims.iter())
            .chain(core::iter::once(&self.heading))
            .all(|v| v.is_finite());
        if !finite {
            return Err(TrackLogError::violation(
                Invariant::FiniteComponents,
                "state has a non-finite component",
            ));
        }
        if !(self.heading > -PI && self.heading <= PI) {
            return Err(TrackLogError::violation(
                Invariant::HeadingRange,
                format!("heading {} outside (-pi, pi]", self.heading),
            ));
        }
        if self.box_dims.iter().any(|d| *d <= 0.0) {
            return Err(TrackLogError::violation(
                Invariant::PositiveBoxDims,
                format!("box_dims {:?} must all be > 0", self.box_dims),
            ));
        }
        Ok(())
    }

    pub fn planar_speed(&self) -> f64 {
        math::hypot(self.velocity[0], self.velocity[1])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrackedObject {
    pub track_id: String,
    pub category: ObjectCategory,
    pub states: BTreeMap<Timestamp, ObjectState>,
}

/// The invariants a log or ground-truth file can violate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Invariant {
    TimestampsIncreasing,
    MinTimestamps,
    UniqueTrackIds,
    NonEmptyStates,
    StateTimestampInLog,
    PositiveBoxDims,
    HeadingRange,
    FiniteComponents,
    KnownCategory,
    GroundTruthLogId,
    GroundTruthInLog,
}

impl Invariant {
    pub fn name(self) -> &'static str {
        match self {
            Invariant::TimestampsIncreasing => "timestamps strictly increasing",
            Invariant::MinTimestamps => "at least 2 timestamps",
            Invariant::UniqueTrackIds => "track_ids pairwise distinct",
            Invariant::NonEmptyStates => "states non-empty",
            Invariant::StateTimestampInLog => "state timestamps belong to the log",
            Invariant::PositiveBoxDims => "box_dims all > 0",
            Invariant::HeadingRange => "heading within (-pi, pi]",
            Invariant::FiniteComponents => "all components finite",
            Invariant::KnownCategory => "category in registry",
            Invariant::GroundTruthLogId => "ground truth log_id matches log",
            Invariant::GroundTruthInLog => "relevant pairs exist in the log",
        }
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrackLogError {
    #[error("invariant violated [{invariant}]: {detail}")]
    InvariantViolation { invariant: Invariant, detail: String },
    #[error("unknown track `{0}`")]
    UnknownTrack(String),
}

impl TrackLogError {
    pub fn violation(invariant: Invariant, detail: impl Into<String>) -> Self {
        TrackLogError::InvariantViolation {
            invariant,
            detail: detail.into(),
        }
    }

    pub fn invariant(&self) -> Option<Invariant> {
        match self {
            TrackLogError::InvariantViolation { invariant, .. } => Some(*invariant),
            TrackLogError::UnknownTrack(_) => None,
        }
    }
}

/// An immutable recording: sorted timestamps plus the objects seen in it.
#[derive(Clone, Debug, PartialEq)]
pub struct TrackLog {
    log_id: String,
    timestamps: Vec<Timestamp>,
    objects: Vec<TrackedObject>,
    index: BTreeMap<String, usize>,
}

impl TrackLog {
    /// Validates every log invariant; object order is preserved.
    pub fn new(
        log_id: impl Into<String>,
        timestamps: Vec<Timestamp>,
        objects: Vec<TrackedObject>,
    ) -> Result<Self, TrackLogError> {
        if timestamps.len() < 2 {
            return Err(TrackLogError::violation(
                Invariant::MinTimestamps,
                format!("log has {} timestamp(s)", timestamps.len()),
            ));
        }
        if let Some(w) = timestamps.windows(2).find(|w| w[0] >= w[1]) {
            return Err(TrackLogError::violation(
                Invariant::TimestampsIncreasing,
                format!("timestamp {} is followed by {}", w[0], w[1]),
            ));
        }
        let mut index = BTreeMap::new();
        for (i, obj) in objects.iter().enumerate() {
            if index.insert(obj.track_id.clone(), i).is_some() {
                return Err(TrackLogError::violation(
                    Invariant::UniqueTrackIds,
                    format!("duplicate track_id `{}`", obj.track_id),
                ));
            }
            if obj.states.is_empty() {
                return Err(TrackLogError::violation(
                    Invariant::NonEmptyStates,
                    format!("track `{}` has no states", obj.track_id),
                ));
            }
            for (t, state) in &obj.states {
                if timestamps.binary_search(t).is_err() {
                    return Err(TrackLogError::violation(
                        Invariant::StateTimestampInLog,
                        format!("track `{}` has a state at {t}, not a log timestamp", obj.track_id),
                    ));
                }
                state.validate().map_err(|e| match e {
                    TrackLogError::InvariantViolation { invariant, detail } => {
                        TrackLogError::violation(
                            invariant,
                            format!("track `{}` at {t}: {detail}", obj.track_id),
                        )
                    }
                    other => other,
                })?;
            }
        }
        Ok(Self {
            log_id: log_id.into(),
            timestamps,
            objects,
            index,
        })
    }

    pub fn log_id(&self) -> &str {
        &self.log_id
    }

    pub fn timestamps(&self) -> &[Timestamp] {
        &self.timestamps
    }

    pub fn objects(&self) -> &[TrackedObject] {
        &self.objects
    }

    pub fn object(&self, track_id: &str) -> Option<&TrackedObject> {
        self.index.get(track_id).map(|&i| &self.objects[i])
    }

    /// The stored state of `track_id` at `t`; no interpolation.
    pub fn object_state_at(
        &self,
        track_id: &str,
        t: Timestamp,
    ) -> Result<Option<&ObjectState>, TrackLogError> {
        self.object(track_id)
            .map(|o| o.states.get(&t))
            .ok_or_else(|| TrackLogError::UnknownTrack(track_id.into()))
    }

    /// The log timestamp immediately before `t`, if `t` is a log timestamp.
    pub fn prev_timestamp(&self, t: Timestamp) -> Option<Timestamp> {
        let i = self.timestamps.binary_search(&t).ok()?;
        i.checked_sub(1).map(|j| self.timestamps[j])
    }

    /// The log timestamp immediately after `t`, if `t` is a log timestamp.
    pub fn next_timestamp(&self, t: Timestamp) -> Option<Timestamp> {
        let i = self.timestamps.binary_search(&t).ok()?;
        self.timestamps.get(i + 1).copied()
    }

    /// Every object with its full lifespan.
    pub fn everything(&self) -> ScenarioSet {
        let mut out = ScenarioSet::new();
        for obj in &self.objects {
            out.insert_track(&obj.track_id, obj.states.keys().copied());
        }
        out
    }
}

/// The labelled answer to one query on one log.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruthScenario {
    pub query_text: String,
    pub log_id: String,
    pub relevant: ScenarioSet,
}

impl GroundTruthScenario {
    /// Checks that every relevant pair exists in `log`.
    pub fn new(
        query_text: impl Into<String>,
        log: &TrackLog,
        relevant: ScenarioSet,
    ) -> Result<Self, TrackLogError> {
        let gt = Self {
            query_text: query_text.into(),
            log_id: log.log_id().into(),
            relevant,
        };
        gt.validate_against(log)?;
        Ok(gt)
    }

    pub fn validate_against(&self, log: &TrackLog) -> Result<(), TrackLogError> {
        if self.log_id != log.log_id() {
            return Err(TrackLogError::violation(
                Invariant::GroundTruthLogId,
                format!("ground truth names log `{}`, log is `{}`", self.log_id, log.log_id()),
            ));
        }
        if let Some((id, t)) = self.relevant.first_missing_in(log) {
            return Err(TrackLogError::violation(
                Invariant::GroundTruthInLog,
                format!("relevant pair ({id}, {t}) is not in the log"),
            ));
        }
        Ok(())
    }

    pub fn is_positive_log(&self) -> bool {
        !self.relevant.is_empty()
    }
}
