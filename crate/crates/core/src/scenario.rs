//! `ScenarioSet`: the value every predicate consumes and returns.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;

use crate::tracklog::{Timestamp, TrackLog};

/// For each track, the timestamps at which a scenario holds.
///
/// Empty timestamp sets are never stored, so two sets holding the same
/// `(track_id, timestamp)` pairs always compare equal.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct ScenarioSet {
    entries: BTreeMap<String, BTreeSet<Timestamp>>,
}

impl ScenarioSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, track_id: &str, t: Timestamp) -> bool {
        match self.entries.get_mut(track_id) {
            Some(set) => set.insert(t),
            None => {
                let mut set = BTreeSet::new();
                set.insert(t);
                self.entries.insert(track_id.into(), set);
                true
            }
        }
    }

    /// Inserts a whole timestamp set; an empty set is ignored.
    pub fn insert_track<I>(&mut self, track_id: &str, ts: I)
    where
        I: IntoIterator<Item = Timestamp>,
    {
        for t in ts {
            self.insert(track_id, t);
        }
    }

    pub fn contains(&self, track_id: &str, t: Timestamp) -> bool {
        self.entries.get(track_id).is_some_and(|s| s.contains(&t))
    }

    pub fn timestamps(&self, track_id: &str) -> Option<&BTreeSet<Timestamp>> {
        self.entries.get(track_id)
    }

    pub fn track_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn tracks(&self) -> impl Iterator<Item = (&str, &BTreeSet<Timestamp>)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// All `(track_id, timestamp)` pairs in track-id then time order.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, Timestamp)> {
        self.entries
            .iter()
            .flat_map(|(k, v)| v.iter().map(move |t| (k.as_str(), *t)))
    }

    /// Number of `(track_id, timestamp)` pairs.
    pub fn len(&self) -> usize {
        self.entries.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn track_count(&self) -> usize {
        self.entries.len()
    }

    /// Union of the timestamps of every track.
    pub fn all_timestamps(&self) -> BTreeSet<Timestamp> {
        self.entries.values().flatten().copied().collect()
    }

    pub fn intersection(&self, other: &ScenarioSet) -> ScenarioSet {
        let mut out = ScenarioSet::new();
        for (id, ts) in &self.entries {
            if let Some(other_ts) = other.entries.get(id) {
                out.insert_track(id, ts.intersection(other_ts).copied());
            }
        }
        out
    }

    pub fn union(&self, other: &ScenarioSet) -> ScenarioSet {
        let mut out = self.clone();
        for (id, ts) in &other.entries {
            out.insert_track(id, ts.iter().copied());
        }
        out
    }

    /// Pairs in `self` that are not in `other`.
    pub fn difference(&self, other: &ScenarioSet) -> ScenarioSet {
        let mut out = ScenarioSet::new();
        for (id, ts) in &self.entries {
            match other.entries.get(id) {
                Some(other_ts) => out.insert_track(id, ts.difference(other_ts).copied()),
                None => out.insert_track(id, ts.iter().copied()),
            }
        }
        out
    }

    pub fn is_subset(&self, other: &ScenarioSet) -> bool {
        self.pairs().all(|(id, t)| other.contains(id, t))
    }

    /// Returns the first pair that does not exist in `log`.
    pub fn first_missing_in(&self, log: &TrackLog) -> Option<(String, Timestamp)> {
        self.pairs()
            .find(|(id, t)| !log.object(id).is_some_and(|o| o.states.contains_key(t)))
            .map(|(id, t)| (id.into(), t))
    }
}

impl<'a> FromIterator<(&'a str, Timestamp)> for ScenarioSet {
    fn from_iter<I: IntoIterator<Item = (&'a str, Timestamp)>>(iter: I) -> Self {
        let mut out = ScenarioSet::new();
        for (id, t) in iter {
            out.insert(id, t);
        }
        out
    }
}
