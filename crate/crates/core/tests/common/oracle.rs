//! Brute-force reference implementations of the atomic predicates, plus a
//! random log generator. Every oracle walks all log timestamps and all
//! objects directly and uses its own geometry, so agreement with the
//! library is meaningful.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scenmine_core::geometry::Direction;
use scenmine_core::predicates::RelativeHeading;
use scenmine_core::{CategoryRegistry, ObjectState, ScenarioSet, TrackLog, TrackedObject};

pub const CATEGORIES: [&str; 4] = ["PEDESTRIAN", "REGULAR_VEHICLE", "BUS", "BICYCLIST"];

/// A random log with at most `max_objects` objects and `max_frames`
/// timestamps. Objects cluster within a few tens of meters so relations
/// actually fire, appear and vanish at random, and occasionally share a
/// position with another object.
pub fn random_log(seed: u64, max_objects: usize, max_frames: usize) -> TrackLog {
    random_log_with(seed, max_objects, max_frames, 0.03)
}

/// Like [`random_log`], with the chance of copying another object's
/// position given explicitly. Zero keeps every scene in general position.
pub fn random_log_with(seed: u64, max_objects: usize, max_frames: usize, coincide: f64) -> TrackLog {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let registry = CategoryRegistry::default();
    let n = rng.random_range(2..=max_frames);
    let mut t = 1_000_000_000_000i64;
    let mut timestamps = Vec::with_capacity(n);
    for _ in 0..n {
        timestamps.push(t);
        t += if rng.random_bool(0.8) { 100_000_000 } else { rng.random_range(50_000_000..300_000_000) };
    }
    let m = rng.random_range(0..=max_objects);
    let mut objects: Vec<TrackedObject> = Vec::with_capacity(m);
    for k in 0..m {
        let category = registry.resolve(CATEGORIES[rng.random_range(0..CATEGORIES.len())]).unwrap();
        let start = rng.random_range(0..n);
        let end = rng.random_range(start..n);
        let mut x = rng.random_range(-25.0..25.0);
        let mut y = rng.random_range(-25.0..25.0);
        let mut heading: f64 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let mut speed: f64 = if rng.random_bool(0.25) { 0.0 } else { rng.random_range(0.0..14.0) };
        let aligned = rng.random_bool(0.7);
        let mut states = BTreeMap::new();
        for f in start..=end {
            if f > start && rng.random_bool(0.08) {
                continue;
            }
            if rng.random_bool(0.1) {
                heading += rng.random_range(-0.6..0.6);
            }
            if rng.random_bool(0.15) {
                speed = (speed + rng.random_range(-6.0..3.0)).max(0.0);
            }
            let vdir = if aligned { heading } else { heading + rng.random_range(-3.0..3.0) };
            x += speed * 0.1 * vdir.cos();
            y += speed * 0.1 * vdir.sin();
            let mut position = [x, y, rng.random_range(-0.5..0.5)];
            if k > 0 && rng.random_bool(coincide) {
                let other: &TrackedObject = &objects[rng.random_range(0..k)];
                if let Some(s) = other.states.get(&timestamps[f]) {
                    position = s.position;
                }
            }
            let wrapped = (heading + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI) - std::f64::consts::PI;
            let wrapped = if wrapped <= -std::f64::consts::PI { std::f64::consts::PI } else { wrapped };
            states.insert(
                timestamps[f],
                ObjectState {
                    position,
                    heading: wrapped,
                    velocity: [speed * vdir.cos(), speed * vdir.sin(), 0.0],
                    box_dims: [rng.random_range(0.5..10.0), rng.random_range(0.5..3.0), 1.5],
                },
            );
        }
        objects.push(TrackedObject {
            track_id: format!("obj{k:02}"),
            category,
            states,
        });
    }
    TrackLog::new(format!("random-{seed}"), timestamps, objects).unwrap()
}

/// A random subset of all pairs in the log.
pub fn random_subset(log: &TrackLog, rng: &mut ChaCha8Rng, keep: f64) -> ScenarioSet {
    let mut out = ScenarioSet::new();
    for obj in log.objects() {
        for t in obj.states.keys() {
            if rng.random_bool(keep) {
                out.insert(&obj.track_id, *t);
            }
        }
    }
    out
}

fn states(log: &TrackLog) -> impl Iterator<Item = (&str, i64, &ObjectState)> {
    log.timestamps().iter().flat_map(move |&t| {
        log.objects()
            .iter()
            .filter_map(move |o| o.states.get(&t).map(|s| (o.track_id.as_str(), t, s)))
    })
}

fn others<'a>(
    log: &'a TrackLog,
    related: &'a ScenarioSet,
    me: &'a str,
    t: i64,
) -> impl Iterator<Item = &'a ObjectState> + 'a {
    log.objects()
        .iter()
        .filter(move |o| o.track_id != me && related.contains(&o.track_id, t))
        .filter_map(move |o| o.states.get(&t))
}

/// (forward, left) coordinates of `target` in `me`'s heading frame.
fn local(me: &ObjectState, target: &ObjectState) -> (f64, f64) {
    let dx = target.position[0] - me.position[0];
    let dy = target.position[1] - me.position[1];
    let (fx, fy) = (me.heading.cos(), me.heading.sin());
    (dx * fx + dy * fy, dy * fx - dx * fy)
}

/// 45-degree cones with priority forward, backward, left, right.
fn cone(long: f64, lat: f64) -> Option<Direction> {
    if long == 0.0 && lat == 0.0 {
        None
    } else if long > 0.0 && lat.abs() <= long {
        Some(Direction::Forward)
    } else if long < 0.0 && lat.abs() <= -long {
        Some(Direction::Backward)
    } else if lat > 0.0 {
        Some(Direction::Left)
    } else {
        Some(Direction::Right)
    }
}

/// (along-axis, off-axis) coordinates for a direction.
fn along_axis(long: f64, lat: f64, d: Direction) -> (f64, f64) {
    match d {
        Direction::Forward => (long, lat),
        Direction::Backward => (-long, lat),
        Direction::Left => (lat, long),
        Direction::Right => (-lat, long),
    }
}

fn angle(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    let c = (ax * bx + ay * by) / ((ax * ax + ay * ay).sqrt() * (bx * bx + by * by).sqrt());
    c.clamp(-1.0, 1.0).acos()
}

fn speed(s: &ObjectState) -> f64 {
    (s.velocity[0] * s.velocity[0] + s.velocity[1] * s.velocity[1]).sqrt()
}

pub fn category(log: &TrackLog, name: &str) -> ScenarioSet {
    let mut out = ScenarioSet::new();
    for (id, t, _) in states(log) {
        if log.object(id).unwrap().category.as_str() == name {
            out.insert(id, t);
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
pub fn relative_direction(
    log: &TrackLog,
    track: &ScenarioSet,
    related: &ScenarioSet,
    direction: Direction,
    min_number: u64,
    max_number: u64,
    within_distance: f64,
    lateral_thresh: f64,
) -> ScenarioSet {
    let mut out = ScenarioSet::new();
    for (id, t, me) in states(log) {
        if !track.contains(id, t) {
            continue;
        }
        let n = others(log, related, id, t)
            .filter(|o| {
                let (long, lat) = local(me, o);
                let (_, off) = along_axis(long, lat, direction);
                cone(long, lat) == Some(direction)
                    && (long * long + lat * lat).sqrt() <= within_distance
                    && off.abs() <= lateral_thresh
            })
            .count() as u64;
        if min_number <= n && n <= max_number {
            out.insert(id, t);
        }
    }
    out
}

pub fn crossed_by(
    log: &TrackLog,
    track: &ScenarioSet,
    related: &ScenarioSet,
    direction: Direction,
    band: f64,
    extent: f64,
) -> ScenarioSet {
    let ts = log.timestamps();
    let mut out = ScenarioSet::new();
    for (id, t, me) in states(log) {
        if !track.contains(id, t) {
            continue;
        }
        let i = ts.iter().position(|&x| x == t).unwrap();
        let mut windows = Vec::new();
        if i > 0 {
            windows.push((ts[i - 1], t));
        }
        if i + 1 < ts.len() {
            windows.push((t, ts[i + 1]));
        }
        let hit = log.objects().iter().filter(|o| o.track_id != id).any(|o| {
            windows.iter().any(|&(a, b)| {
                if !(related.contains(&o.track_id, a) && related.contains(&o.track_id, b)) {
                    return false;
                }
                let (Some(p), Some(q)) = (o.states.get(&a), o.states.get(&b)) else {
                    return false;
                };
                let (l0, t0) = local(me, p);
                let (l1, t1) = local(me, q);
                let (a0, c0) = along_axis(l0, t0, direction);
                let (a1, c1) = along_axis(l1, t1, direction);
                let straddles = (c0 <= 0.0 && c1 >= 0.0) || (c0 >= 0.0 && c1 <= 0.0);
                if !straddles || (c0 == 0.0 && c1 == 0.0) || c0.abs() > band || c1.abs() > band {
                    return false;
                }
                let along = (a0 * c1.abs() + a1 * c0.abs()) / (c0.abs() + c1.abs());
                (0.0..=extent).contains(&along)
            })
        });
        if hit {
            out.insert(id, t);
        }
    }
    out
}

pub fn heading_relative(
    log: &TrackLog,
    track: &ScenarioSet,
    related: &ScenarioSet,
    bin: RelativeHeading,
) -> ScenarioSet {
    let quarter = std::f64::consts::FRAC_PI_4;
    let mut out = ScenarioSet::new();
    for (id, t, me) in states(log) {
        if !track.contains(id, t) || speed(me) < 0.5 {
            continue;
        }
        let hit = others(log, related, id, t).any(|o| {
            if speed(o) < 0.5 {
                return false;
            }
            let a = angle(me.velocity[0], me.velocity[1], o.velocity[0], o.velocity[1]);
            match bin {
                RelativeHeading::Same => a < quarter,
                RelativeHeading::Opposite => a > 3.0 * quarter,
                RelativeHeading::Perpendicular => (quarter..=3.0 * quarter).contains(&a),
            }
        });
        if hit {
            out.insert(id, t);
        }
    }
    out
}

pub fn facing(log: &TrackLog, track: &ScenarioSet, related: &ScenarioSet, within_angle: f64, max_distance: f64) -> ScenarioSet {
    let mut out = ScenarioSet::new();
    for (id, t, me) in states(log) {
        if !track.contains(id, t) {
            continue;
        }
        let hit = others(log, related, id, t).any(|o| {
            let dx = o.position[0] - me.position[0];
            let dy = o.position[1] - me.position[1];
            (dx != 0.0 || dy != 0.0)
                && (dx * dx + dy * dy).sqrt() <= max_distance
                && angle(me.heading.cos(), me.heading.sin(), dx, dy) <= within_angle
        });
        if hit {
            out.insert(id, t);
        }
    }
    out
}

pub fn heading_toward(
    log: &TrackLog,
    track: &ScenarioSet,
    related: &ScenarioSet,
    within_angle: f64,
    minimum_speed: f64,
    max_distance: f64,
) -> ScenarioSet {
    let mut out = ScenarioSet::new();
    for (id, t, me) in states(log) {
        if !track.contains(id, t) || speed(me) < minimum_speed {
            continue;
        }
        let hit = others(log, related, id, t).any(|o| {
            let dx = o.position[0] - me.position[0];
            let dy = o.position[1] - me.position[1];
            (dx != 0.0 || dy != 0.0)
                && (dx * dx + dy * dy).sqrt() <= max_distance
                && angle(me.velocity[0], me.velocity[1], dx, dy) <= within_angle
        });
        if hit {
            out.insert(id, t);
        }
    }
    out
}

pub fn near(log: &TrackLog, track: &ScenarioSet, related: &ScenarioSet, distance: f64, min_objects: u64) -> ScenarioSet {
    let mut out = ScenarioSet::new();
    for (id, t, me) in states(log) {
        if !track.contains(id, t) {
            continue;
        }
        let n = others(log, related, id, t)
            .filter(|o| {
                let dx = o.position[0] - me.position[0];
                let dy = o.position[1] - me.position[1];
                (dx * dx + dy * dy).sqrt() <= distance
            })
            .count() as u64;
        if n >= min_objects {
            out.insert(id, t);
        }
    }
    out
}

pub fn velocity_between(log: &TrackLog, track: &ScenarioSet, lo: f64, hi: f64) -> ScenarioSet {
    let mut out = ScenarioSet::new();
    for (id, t, me) in states(log) {
        if track.contains(id, t) && lo <= speed(me) && speed(me) <= hi {
            out.insert(id, t);
        }
    }
    out
}

pub fn decelerating(log: &TrackLog, track: &ScenarioSet, min_decel: f64) -> ScenarioSet {
    let ts = log.timestamps();
    let mut out = ScenarioSet::new();
    for (id, t, me) in states(log) {
        if !track.contains(id, t) {
            continue;
        }
        let i = ts.iter().position(|&x| x == t).unwrap();
        if i == 0 {
            continue;
        }
        let Some(prev) = log.object(id).unwrap().states.get(&ts[i - 1]) else {
            continue;
        };
        let dt = (t - ts[i - 1]) as f64 * 1e-9;
        if (speed(me) - speed(prev)) / dt <= -min_decel {
            out.insert(id, t);
        }
    }
    out
}

pub fn followed_by(first: &ScenarioSet, second: &ScenarioSet, window_nanos: i64, cross_track: bool) -> ScenarioSet {
    let mut out = ScenarioSet::new();
    for (id, t) in second.pairs() {
        let hit = first
            .pairs()
            .any(|(fid, ft)| (cross_track || fid == id) && ft < t && t - ft <= window_nanos);
        if hit {
            out.insert(id, t);
        }
    }
    out
}

/// Runs every atomic predicate against its oracle on `log` with random
/// parameters and candidate sets. Returns one line per mismatch.
pub fn compare_all(log: &TrackLog, seed: u64) -> Vec<String> {
    use scenmine_core::predicates as p;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let registry = CategoryRegistry::default();
    let mut bad = Vec::new();
    let mut check = |name: &str, got: ScenarioSet, want: ScenarioSet| {
        if got != want {
            bad.push(format!("{}: {name}: library {} pairs, oracle {} pairs", log.log_id(), got.len(), want.len()));
        }
    };

    for name in CATEGORIES {
        let cat = registry.resolve(name).unwrap();
        check("get_objects_of_category", p::get_objects_of_category(log, &cat), category(log, name));
    }

    let pick = |rng: &mut ChaCha8Rng| -> ScenarioSet {
        match rng.random_range(0..3) {
            0 => log.everything(),
            1 => category(log, CATEGORIES[rng.random_range(0..CATEGORIES.len())]),
            _ => random_subset(log, rng, 0.6),
        }
    };
    for _ in 0..4 {
        let track = pick(&mut rng);
        let related = pick(&mut rng);
        let direction = Direction::ALL[rng.random_range(0..4)];

        let mut params = p::RelativeDirectionParams::new(direction);
        params.min_number = rng.random_range(1..=2);
        params.max_number = if rng.random_bool(0.5) { u64::MAX } else { rng.random_range(params.min_number..=3) };
        params.within_distance = rng.random_range(3.0..60.0);
        params.lateral_thresh = if rng.random_bool(0.5) { f64::INFINITY } else { rng.random_range(0.5..20.0) };
        check(
            "has_objects_in_relative_direction",
            p::has_objects_in_relative_direction(log, &track, &related, &params).unwrap(),
            relative_direction(
                log,
                &track,
                &related,
                direction,
                params.min_number,
                params.max_number,
                params.within_distance,
                params.lateral_thresh,
            ),
        );

        let band = rng.random_range(0.5..10.0);
        let extent = rng.random_range(1.0..30.0);
        check(
            "being_crossed_by",
            p::being_crossed_by(log, &track, &related, direction, band, extent).unwrap(),
            crossed_by(log, &track, &related, direction, band, extent),
        );

        let bin = RelativeHeading::ALL[rng.random_range(0..3)];
        check(
            "heading_in_relative_direction_to",
            p::heading_in_relative_direction_to(log, &track, &related, bin),
            heading_relative(log, &track, &related, bin),
        );

        let within_angle = rng.random_range(0.05..3.1);
        let max_distance = rng.random_range(2.0..60.0);
        check(
            "facing_toward",
            p::facing_toward(log, &track, &related, within_angle, max_distance).unwrap(),
            facing(log, &track, &related, within_angle, max_distance),
        );

        let min_speed = rng.random_range(0.1..8.0);
        check(
            "heading_toward",
            p::heading_toward(log, &track, &related, within_angle, min_speed, max_distance).unwrap(),
            heading_toward(log, &track, &related, within_angle, min_speed, max_distance),
        );

        let thresh = rng.random_range(1.0..30.0);
        let min_objects = rng.random_range(0..=3);
        check(
            "near_objects",
            p::near_objects(log, &track, &related, thresh, min_objects).unwrap(),
            near(log, &track, &related, thresh, min_objects),
        );

        let lo = rng.random_range(0.0..6.0);
        let hi = if rng.random_bool(0.3) { f64::INFINITY } else { lo + rng.random_range(0.0..10.0) };
        check("has_velocity", p::has_velocity(log, &track, lo, hi).unwrap(), velocity_between(log, &track, lo, hi));

        let decel = rng.random_range(0.5..30.0);
        check("decelerating", p::decelerating(log, &track, decel).unwrap(), decelerating(log, &track, decel));

        let window = rng.random_range(0.05..3.0);
        let cross = rng.random_bool(0.5);
        check(
            "followed_by",
            p::followed_by(&track, &related, window, cross).unwrap(),
            followed_by(&track, &related, p::seconds_to_nanos(window), cross),
        );
    }
    bad
}
