//! Planar geometry kernels behind the spatial predicates.
//!
//! Everything here works in the ground plane; `z` is ignored. Offsets are
//! taken center to center.

use core::fmt;
use core::str::FromStr;

use crate::math::{self, FRAC_PI_2, FRAC_PI_4, PI};
use crate::tracklog::ObjectState;

/// Default half-angle of the forward/backward cones.
pub const DEFAULT_LONG_HALF_ANGLE: f64 = FRAC_PI_4;
/// Default half-angle of the left/right cones.
pub const DEFAULT_LAT_HALF_ANGLE: f64 = FRAC_PI_4;

/// Position of a target in an observer's heading frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeOffset {
    /// Positive ahead of the observer.
    pub longitudinal: f64,
    /// Positive to the observer's left.
    pub lateral: f64,
    /// Planar distance, `hypot(longitudinal, lateral)`.
    pub distance: f64,
}

impl RelativeOffset {
    pub fn new(longitudinal: f64, lateral: f64) -> Self {
        Self {
            longitudinal,
            lateral,
            distance: math::hypot(longitudinal, lateral),
        }
    }

    /// Coordinate along the axis of `direction` (positive outward) and the
    /// coordinate orthogonal to it.
    pub fn axis_coordinates(&self, direction: Direction) -> (f64, f64) {
        match direction {
            Direction::Forward => (self.longitudinal, self.lateral),
            Direction::Backward => (-self.longitudinal, self.lateral),
            Direction::Left => (self.lateral, self.longitudinal),
            Direction::Right => (-self.lateral, self.longitudinal),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Direction {
    Forward,
    Backward,
    Left,
    Right,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::Forward,
        Direction::Backward,
        Direction::Left,
        Direction::Right,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
            Direction::Left => "left",
            Direction::Right => "right",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Direction::ALL.into_iter().find(|d| d.as_str() == s).ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("invalid threshold {name} = {value}")]
    InvalidThreshold { name: &'static str, value: f64 },
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),
}

/// Rotates the planar displacement `target - observer` into the observer's
/// heading frame.
pub fn relative_offset(observer: &ObjectState, target: &ObjectState) -> RelativeOffset {
    let dx = target.position[0] - observer.position[0];
    let dy = target.position[1] - observer.position[1];
    let (s, c) = (math::sin(observer.heading), math::cos(observer.heading));
    RelativeOffset::new(dx * c + dy * s, -dx * s + dy * c)
}

/// Assigns an offset to one of the four direction cones.
///
/// Cones may overlap when the half-angles exceed `pi/4`; overlaps resolve by
/// the priority forward > backward > left > right. A zero offset has no
/// direction.
pub fn classify_direction(
    off: &RelativeOffset,
    long_half_angle: f64,
    lat_half_angle: f64,
) -> Result<Option<Direction>, GeometryError> {
    check_half_angle("long_half_angle", long_half_angle)?;
    check_half_angle("lat_half_angle", lat_half_angle)?;
    if off.distance == 0.0 {
        return Ok(None);
    }
    let from_forward = math::abs(math::atan2(off.lateral, off.longitudinal));
    if from_forward <= long_half_angle {
        return Ok(Some(Direction::Forward));
    }
    if PI - from_forward <= long_half_angle {
        return Ok(Some(Direction::Backward));
    }
    let from_side = math::abs(math::atan2(off.longitudinal, math::abs(off.lateral)));
    if from_side <= lat_half_angle {
        if off.lateral > 0.0 {
            return Ok(Some(Direction::Left));
        }
        if off.lateral < 0.0 {
            return Ok(Some(Direction::Right));
        }
    }
    Ok(None)
}

fn check_half_angle(name: &'static str, value: f64) -> Result<(), GeometryError> {
    if value > 0.0 && value < FRAC_PI_2 {
        Ok(())
    } else {
        Err(GeometryError::InvalidThreshold { name, value })
    }
}

fn angle_between(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    let cross = ax * by - ay * bx;
    let dot = ax * bx + ay * by;
    math::atan2(math::abs(cross), dot)
}

/// Unsigned angle between the observer's heading and the direction to the
/// target, in `[0, pi]`.
pub fn bearing_angle(observer: &ObjectState, target: &ObjectState) -> Result<f64, GeometryError> {
    let dx = target.position[0] - observer.position[0];
    let dy = target.position[1] - observer.position[1];
    if dx == 0.0 && dy == 0.0 {
        return Err(GeometryError::DegenerateGeometry("observer and target share a position"));
    }
    Ok(angle_between(
        math::cos(observer.heading),
        math::sin(observer.heading),
        dx,
        dy,
    ))
}

/// Unsigned angle between the observer's planar velocity and the direction
/// to the target, in `[0, pi]`.
pub fn velocity_bearing_angle(
    observer: &ObjectState,
    target: &ObjectState,
) -> Result<f64, GeometryError> {
    let (vx, vy) = (observer.velocity[0], observer.velocity[1]);
    if vx == 0.0 && vy == 0.0 {
        return Err(GeometryError::DegenerateGeometry("observer has zero planar speed"));
    }
    let dx = target.position[0] - observer.position[0];
    let dy = target.position[1] - observer.position[1];
    if dx == 0.0 && dy == 0.0 {
        return Err(GeometryError::DegenerateGeometry("observer and target share a position"));
    }
    Ok(angle_between(vx, vy, dx, dy))
}

/// Whether the related object's motion from `related_prev` to
/// `related_next`, seen from `track`, crosses the axis of `direction`.
///
/// The orthogonal coordinate must change sign (or leave/reach zero) between
/// the two endpoints, both endpoints must lie within `lateral_band` of the
/// axis, and the interpolated crossing point must lie between the track's
/// center and `forward_extent` along the axis.
pub fn segment_crosses_front_plane(
    track: &ObjectState,
    related_prev: &ObjectState,
    related_next: &ObjectState,
    direction: Direction,
    lateral_band: f64,
    forward_extent: f64,
) -> Result<bool, GeometryError> {
    if !(lateral_band > 0.0 && lateral_band.is_finite()) {
        return Err(GeometryError::InvalidThreshold {
            name: "lateral_band",
            value: lateral_band,
        });
    }
    if !(forward_extent > 0.0 && forward_extent.is_finite()) {
        return Err(GeometryError::InvalidThreshold {
            name: "forward_extent",
            value: forward_extent,
        });
    }
    let (a0, c0) = relative_offset(track, related_prev).axis_coordinates(direction);
    let (a1, c1) = relative_offset(track, related_next).axis_coordinates(direction);
    if c0 * c1 > 0.0 || (c0 == 0.0 && c1 == 0.0) {
        return Ok(false);
    }
    if math::abs(c0) > lateral_band || math::abs(c1) > lateral_band {
        return Ok(false);
    }
    let s = c0 / (c0 - c1);
    let along = a0 + s * (a1 - a0);
    Ok((0.0..=forward_extent).contains(&along))
}
