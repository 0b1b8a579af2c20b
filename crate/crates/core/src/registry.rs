//! Catalog of the atomic functions a scenario program may call.
//!
//! The same table drives the DSL checker, the interpreter's argument
//! binding, and the human-readable catalog shown to the language model.

use core::f64::consts::PI;

use crate::category::CategoryRegistry;
use crate::geometry::Direction;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ParamKind {
    /// Subject objects; results are a subset of these.
    TrackCandidates,
    /// Reference objects the relation is measured against.
    RelatedCandidates,
    /// Any scenario set (boolean and temporal combinators).
    Scenario,
    Category,
    Direction,
    RelativeHeading,
    Number,
    /// Non-negative integer; `inf` allowed.
    Count,
    Bool,
}

impl ParamKind {
    pub fn is_scenario(self) -> bool {
        matches!(
            self,
            ParamKind::TrackCandidates | ParamKind::RelatedCandidates | ParamKind::Scenario
        )
    }

    pub fn describe(self) -> &'static str {
        match self {
            ParamKind::TrackCandidates | ParamKind::RelatedCandidates | ParamKind::Scenario => {
                "scenario set"
            }
            ParamKind::Category => "category name string",
            ParamKind::Direction => "one of: forward, backward, left, right",
            ParamKind::RelativeHeading => "one of: same, opposite, perpendicular",
            ParamKind::Number => "number",
            ParamKind::Count => "non-negative integer or inf",
            ParamKind::Bool => "true or false",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DefaultValue {
    Number(f64),
    /// `u64::MAX` stands for `inf`.
    Count(u64),
    Direction(Direction),
    Bool(bool),
}

impl core::fmt::Display for DefaultValue {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DefaultValue::Number(v) if v.is_infinite() => f.write_str("inf"),
            DefaultValue::Number(v) => write!(f, "{v}"),
            DefaultValue::Count(u64::MAX) => f.write_str("inf"),
            DefaultValue::Count(n) => write!(f, "{n}"),
            DefaultValue::Direction(d) => write!(f, "\"{d}\""),
            DefaultValue::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub default: Option<DefaultValue>,
    pub doc: &'static str,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FunctionSpec {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: &'static [ParamSpec],
}

impl FunctionSpec {
    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p.name == name)
    }
}

const fn req(name: &'static str, kind: ParamKind, doc: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind,
        default: None,
        doc,
    }
}

const fn opt(name: &'static str, kind: ParamKind, default: DefaultValue, doc: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind,
        default: Some(default),
        doc,
    }
}

const TRACK: ParamSpec = req(
    "track_candidates",
    ParamKind::TrackCandidates,
    "the subject objects; the result is always a subset of these",
);
const RELATED: ParamSpec = req(
    "related_candidates",
    ParamKind::RelatedCandidates,
    "the reference objects the relation is measured against",
);

use DefaultValue as D;
use ParamKind as K;

pub static FUNCTIONS: &[FunctionSpec] = &[
    FunctionSpec {
        name: "get_objects_of_category",
        summary: "All objects of the given category at every timestamp they exist.",
        params: &[req("category", K::Category, "object category, e.g. \"PEDESTRIAN\"")],
    },
    FunctionSpec {
        name: "has_objects_in_relative_direction",
        summary: "Track candidates that have between min_number and max_number related candidates in the given direction, measured in the track candidate's own frame.",
        params: &[
            TRACK,
            RELATED,
            req("direction", K::Direction, "where the related candidates are, seen from the track candidate"),
            opt("min_number", K::Count, D::Count(1), "fewest related candidates required"),
            opt("max_number", K::Count, D::Count(u64::MAX), "most related candidates allowed"),
            opt("within_distance", K::Number, D::Number(50.0), "meters, center to center"),
            opt("lateral_thresh", K::Number, D::Number(f64::INFINITY), "meters, bound on the offset orthogonal to the direction"),
        ],
    },
    FunctionSpec {
        name: "being_crossed_by",
        summary: "Track candidates whose given side is crossed by a related candidate between consecutive timestamps.",
        params: &[
            TRACK,
            RELATED,
            opt("direction", K::Direction, D::Direction(Direction::Forward), "which side of the track candidate is crossed"),
            opt("lateral_band", K::Number, D::Number(5.0), "meters, half-width of the crossing band around that side's axis"),
            opt("forward_extent", K::Number, D::Number(10.0), "meters, how far out from the track candidate the crossing may happen"),
        ],
    },
    FunctionSpec {
        name: "heading_in_relative_direction_to",
        summary: "Track candidates travelling in the given direction relative to the travel direction of some related candidate (both must move at 0.5 m/s or more).",
        params: &[
            TRACK,
            RELATED,
            req("direction", K::RelativeHeading, "travel direction of the related candidate relative to the track candidate"),
        ],
    },
    FunctionSpec {
        name: "facing_toward",
        summary: "Track candidates whose heading points at some related candidate.",
        params: &[
            TRACK,
            RELATED,
            opt("within_angle", K::Number, D::Number(PI / 8.0), "radians between heading and the direction to the related candidate"),
            opt("max_distance", K::Number, D::Number(50.0), "meters"),
        ],
    },
    FunctionSpec {
        name: "heading_toward",
        summary: "Track candidates whose velocity points at some related candidate.",
        params: &[
            TRACK,
            RELATED,
            opt("within_angle", K::Number, D::Number(PI / 8.0), "radians between velocity and the direction to the related candidate"),
            opt("minimum_speed", K::Number, D::Number(0.5), "meters/second the track candidate must at least move at"),
            opt("max_distance", K::Number, D::Number(50.0), "meters"),
        ],
    },
    FunctionSpec {
        name: "near_objects",
        summary: "Track candidates with at least min_objects related candidates within distance_thresh.",
        params: &[
            TRACK,
            RELATED,
            opt("distance_thresh", K::Number, D::Number(10.0), "meters, planar"),
            opt("min_objects", K::Count, D::Count(1), "fewest nearby related candidates required"),
        ],
    },
    FunctionSpec {
        name: "has_velocity",
        summary: "Track candidates whose planar speed lies between min_velocity and max_velocity.",
        params: &[
            TRACK,
            opt("min_velocity", K::Number, D::Number(0.0), "meters/second"),
            opt("max_velocity", K::Number, D::Number(f64::INFINITY), "meters/second"),
        ],
    },
    FunctionSpec {
        name: "decelerating",
        summary: "Track candidates whose speed dropped by at least min_decel since the previous timestamp (hard braking).",
        params: &[TRACK, opt("min_decel", K::Number, D::Number(4.0), "meters/second^2")],
    },
    FunctionSpec {
        name: "scenario_and",
        summary: "Pairs present in both scenario sets.",
        params: &[
            req("scenario_a", K::Scenario, "first scenario set"),
            req("scenario_b", K::Scenario, "second scenario set"),
        ],
    },
    FunctionSpec {
        name: "scenario_or",
        summary: "Pairs present in either scenario set.",
        params: &[
            req("scenario_a", K::Scenario, "first scenario set"),
            req("scenario_b", K::Scenario, "second scenario set"),
        ],
    },
    FunctionSpec {
        name: "scenario_not",
        summary: "Pairs of base that are not in scenario.",
        params: &[
            req("base", K::Scenario, "scenario set to subtract from"),
            req("scenario", K::Scenario, "scenario set to remove"),
        ],
    },
    FunctionSpec {
        name: "followed_by",
        summary: "Pairs of second preceded by a pair of first on the same track at most within_seconds earlier.",
        params: &[
            req("first", K::Scenario, "the earlier event"),
            req("second", K::Scenario, "the later event; the result is a subset of these"),
            req("within_seconds", K::Number, "seconds, maximum gap between the two events"),
            opt("cross_track", K::Bool, D::Bool(false), "allow the earlier event to come from any track"),
        ],
    },
];

/// Functions plus the category names programs may refer to.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    categories: CategoryRegistry,
}

impl Registry {
    pub fn new(categories: CategoryRegistry) -> Self {
        Self { categories }
    }

    pub fn categories(&self) -> &CategoryRegistry {
        &self.categories
    }

    pub fn functions(&self) -> &'static [FunctionSpec] {
        FUNCTIONS
    }

    pub fn function(&self, name: &str) -> Option<&'static FunctionSpec> {
        FUNCTIONS.iter().find(|f| f.name == name)
    }

    /// Closest function name within edit distance 2.
    pub fn suggest_function(&self, name: &str) -> Option<&'static str> {
        FUNCTIONS
            .iter()
            .map(|f| (edit_distance(name, f.name), f.name))
            .filter(|(d, _)| *d <= 2)
            .min()
            .map(|(_, n)| n)
    }
}

/// Levenshtein distance over chars.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let b: alloc::vec::Vec<char> = b.chars().collect();
    let mut row: alloc::vec::Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.chars().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = (diag + usize::from(ca != *cb)).min(up + 1).min(row[j] + 1);
            diag = up;
        }
    }
    row[b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_unique() {
        for (i, f) in FUNCTIONS.iter().enumerate() {
            assert!(FUNCTIONS[i + 1..].iter().all(|g| g.name != f.name));
            for (j, p) in f.params.iter().enumerate() {
                assert!(f.params[j + 1..].iter().all(|q| q.name != p.name));
            }
        }
    }

    #[test]
    fn suggestions() {
        let reg = Registry::default();
        assert_eq!(reg.suggest_function("facing_towards"), Some("facing_toward"));
        assert_eq!(reg.suggest_function("nothing_like_it"), None);
        assert_eq!(edit_distance("kitten", "sitting"), 3);
        assert_eq!(edit_distance("", "abc"), 3);
    }

    #[test]
    fn required_params_come_first() {
        for f in FUNCTIONS {
            let first_opt = f.params.iter().position(|p| p.default.is_some()).unwrap_or(f.params.len());
            assert!(f.params[first_opt..].iter().all(|p| p.default.is_some()), "{}", f.name);
        }
    }
}
