use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::ToString;

use super::ast::Program;
use super::check::{bind, Bound, BoundCall};
use super::error::{DslError, DslErrorKind, Span};
use crate::geometry::Direction;
use crate::predicates::{self as pred, PredicateError, RelativeDirectionParams, RelativeHeading};
use crate::registry::Registry;
use crate::scenario::ScenarioSet;
use crate::tracklog::TrackLog;

struct Args<'a> {
    call: BoundCall,
    env: &'a BTreeMap<&'a str, ScenarioSet>,
}

impl Args<'_> {
    fn set(&self, i: usize) -> &ScenarioSet {
        match &self.call.values[i] {
            Bound::Set(name) => &self.env[name.as_str()],
            other => unreachable!("checked binding: {other:?}"),
        }
    }

    fn number(&self, i: usize) -> f64 {
        match self.call.values[i] {
            Bound::Number(v) => v,
            ref other => unreachable!("checked binding: {other:?}"),
        }
    }

    fn count(&self, i: usize) -> u64 {
        match self.call.values[i] {
            Bound::Count(v) => v,
            ref other => unreachable!("checked binding: {other:?}"),
        }
    }

    fn direction(&self, i: usize) -> Direction {
        match self.call.values[i] {
            Bound::Direction(d) => d,
            ref other => unreachable!("checked binding: {other:?}"),
        }
    }

    fn heading(&self, i: usize) -> RelativeHeading {
        match self.call.values[i] {
            Bound::Heading(d) => d,
            ref other => unreachable!("checked binding: {other:?}"),
        }
    }

    fn flag(&self, i: usize) -> bool {
        match self.call.values[i] {
            Bound::Bool(b) => b,
            ref other => unreachable!("checked binding: {other:?}"),
        }
    }

    fn category(&self, i: usize) -> &str {
        match &self.call.values[i] {
            Bound::Category(c) => c,
            other => unreachable!("checked binding: {other:?}"),
        }
    }
}

fn call(args: &Args<'_>, log: &TrackLog, registry: &Registry) -> Result<ScenarioSet, PredicateError> {
    match args.call.spec.name {
        "get_objects_of_category" => {
            let cat = registry.categories().resolve(args.category(0))?;
            Ok(pred::get_objects_of_category(log, &cat))
        }
        "has_objects_in_relative_direction" => {
            let p = RelativeDirectionParams {
                direction: args.direction(2),
                min_number: args.count(3),
                max_number: args.count(4),
                within_distance: args.number(5),
                lateral_thresh: args.number(6),
            };
            pred::has_objects_in_relative_direction(log, args.set(0), args.set(1), &p)
        }
        "being_crossed_by" => pred::being_crossed_by(
            log,
            args.set(0),
            args.set(1),
            args.direction(2),
            args.number(3),
            args.number(4),
        ),
        "heading_in_relative_direction_to" => Ok(pred::heading_in_relative_direction_to(
            log,
            args.set(0),
            args.set(1),
            args.heading(2),
        )),
        "facing_toward" => {
            pred::facing_toward(log, args.set(0), args.set(1), args.number(2), args.number(3))
        }
        "heading_toward" => pred::heading_toward(
            log,
            args.set(0),
            args.set(1),
            args.number(2),
            args.number(3),
            args.number(4),
        ),
        "near_objects" => {
            pred::near_objects(log, args.set(0), args.set(1), args.number(2), args.count(3))
        }
        "has_velocity" => pred::has_velocity(log, args.set(0), args.number(1), args.number(2)),
        "decelerating" => pred::decelerating(log, args.set(0), args.number(1)),
        "scenario_and" => Ok(pred::scenario_and(args.set(0), args.set(1))),
        "scenario_or" => Ok(pred::scenario_or(args.set(0), args.set(1))),
        "scenario_not" => Ok(pred::scenario_not(args.set(0), args.set(1))),
        "followed_by" => pred::followed_by(args.set(0), args.set(1), args.number(2), args.flag(3)),
        other => unreachable!("registry function `{other}` has no implementation"),
    }
}

/// Runs a checked program against one log.
///
/// Statements run in order; the value bound to the output name is
/// returned. A predicate failure is reported as `PredicateRuntime` at the
/// failing statement. A program that fails [`check`](super::check) is
/// rejected with the checker's first error.
pub fn interpret(
    program: &Program,
    log: &TrackLog,
    registry: &Registry,
) -> Result<ScenarioSet, DslError> {
    let mut env: BTreeMap<&str, ScenarioSet> = BTreeMap::new();
    for stmt in &program.statements {
        let defined: BTreeSet<&str> = env.keys().copied().collect();
        let bound = bind(&stmt.call, registry, &defined).map_err(|mut es| es.swap_remove(0))?;
        let args = Args { call: bound, env: &env };
        let value = call(&args, log, registry).map_err(|e| runtime(stmt.span, &stmt.call.function, &e))?;
        env.insert(stmt.name.as_str(), value);
    }
    env.remove(program.output.name.as_str()).ok_or_else(|| {
        DslError::new(
            DslErrorKind::UnknownVariable,
            program.output.span,
            format!("output(...) refers to undefined variable `{}`", program.output.name),
        )
    })
}

fn runtime(span: Span, function: &str, e: &PredicateError) -> DslError {
    let detail = e.to_string();
    DslError::new(
        DslErrorKind::PredicateRuntime,
        span,
        format!("call to `{function}` failed: {detail}"),
    )
}
