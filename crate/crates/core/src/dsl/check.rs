use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::ast::{Arg, Call, Program, Value};
use super::error::{DslError, DslErrorKind, Span};
use crate::geometry::Direction;
use crate::predicates::RelativeHeading;
use crate::registry::{DefaultValue, FunctionSpec, ParamKind, ParamSpec, Registry};

/// A call argument after type resolution.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Bound {
    Set(String),
    Category(String),
    Direction(Direction),
    Heading(RelativeHeading),
    Number(f64),
    Count(u64),
    Bool(bool),
}

/// A call with every parameter resolved, defaults included, in catalog order.
#[derive(Clone, Debug)]
pub(crate) struct BoundCall {
    pub spec: &'static FunctionSpec,
    pub values: Vec<Bound>,
}

fn from_default(d: DefaultValue) -> Bound {
    match d {
        DefaultValue::Number(v) => Bound::Number(v),
        DefaultValue::Count(n) => Bound::Count(n),
        DefaultValue::Direction(d) => Bound::Direction(d),
        DefaultValue::Bool(b) => Bound::Bool(b),
    }
}

fn value_kind(v: &Value) -> &'static str {
    match v {
        Value::Str(_) => "a string",
        Value::Number(_) => "a number",
        Value::Ident(_) => "a name",
    }
}

fn resolve_value(
    f: &FunctionSpec,
    p: &ParamSpec,
    arg: &Arg,
    defined: &BTreeSet<&str>,
) -> Result<Bound, DslError> {
    let type_error = |expected: &str| {
        DslError::new(
            DslErrorKind::TypeError,
            arg.span,
            format!(
                "argument `{}` of `{}` expects {expected}, found {} `{}`",
                p.name,
                f.name,
                value_kind(&arg.value),
                arg.value
            ),
        )
    };
    let enum_error = |given: &str, allowed: &[&str]| {
        DslError::new(
            DslErrorKind::InvalidEnumValue,
            arg.span,
            format!(
                "`{given}` is not a valid value for argument `{}` of `{}`; allowed values: {}",
                p.name,
                f.name,
                allowed.join(", ")
            ),
        )
    };
    match (p.kind, &arg.value) {
        (k, Value::Ident(name)) if k.is_scenario() => {
            if defined.contains(name.as_str()) {
                Ok(Bound::Set(name.clone()))
            } else {
                Err(DslError::new(
                    DslErrorKind::UnknownVariable,
                    arg.span,
                    format!(
                        "variable `{name}` passed as `{}` to `{}` is not defined before this statement",
                        p.name, f.name
                    ),
                ))
            }
        }
        (k, _) if k.is_scenario() => Err(type_error("a scenario set variable")),
        (ParamKind::Category, Value::Str(s)) => Ok(Bound::Category(s.clone())),
        (ParamKind::Category, _) => Err(type_error("a quoted category name")),
        (ParamKind::Direction | ParamKind::RelativeHeading, Value::Ident(s)) if defined.contains(s.as_str()) => {
            Err(type_error("a direction literal"))
        }
        (ParamKind::Direction, Value::Str(s) | Value::Ident(s)) => s
            .parse::<Direction>()
            .map(Bound::Direction)
            .map_err(|_| enum_error(s, &Direction::ALL.map(Direction::as_str))),
        (ParamKind::RelativeHeading, Value::Str(s) | Value::Ident(s)) => s
            .parse::<RelativeHeading>()
            .map(Bound::Heading)
            .map_err(|_| enum_error(s, &RelativeHeading::ALL.map(RelativeHeading::as_str))),
        (ParamKind::Direction | ParamKind::RelativeHeading, _) => Err(type_error("a direction")),
        (ParamKind::Number, Value::Number(v)) => Ok(Bound::Number(*v)),
        (ParamKind::Number, Value::Ident(s)) if s == "inf" => Ok(Bound::Number(f64::INFINITY)),
        (ParamKind::Number, _) => Err(type_error("a number")),
        (ParamKind::Count, Value::Number(v)) if *v >= 0.0 && *v == libm::trunc(*v) && *v < 1e18 => {
            Ok(Bound::Count(*v as u64))
        }
        (ParamKind::Count, Value::Ident(s)) if s == "inf" => Ok(Bound::Count(u64::MAX)),
        (ParamKind::Count, _) => Err(type_error("a non-negative integer")),
        (ParamKind::Bool, Value::Ident(s)) if s == "true" || s == "True" => Ok(Bound::Bool(true)),
        (ParamKind::Bool, Value::Ident(s)) if s == "false" || s == "False" => Ok(Bound::Bool(false)),
        (ParamKind::Bool, _) => Err(type_error("true or false")),
        _ => unreachable!("scenario kinds handled above"),
    }
}

/// Resolves one call against the registry, collecting every problem.
pub(crate) fn bind(
    call: &Call,
    registry: &Registry,
    defined: &BTreeSet<&str>,
) -> Result<BoundCall, Vec<DslError>> {
    let Some(spec) = registry.function(&call.function) else {
        let hint = match registry.suggest_function(&call.function) {
            Some(s) => format!("; did you mean `{s}`?"),
            None => String::new(),
        };
        return Err(vec![DslError::new(
            DslErrorKind::UnknownFunction,
            call.span,
            format!("unknown function `{}`{hint}", call.function),
        )]);
    };
    let mut errors = Vec::new();
    let mut slots: Vec<Option<(&Arg, Span)>> = vec![None; spec.params.len()];
    if call.args.len() > spec.params.len() {
        errors.push(DslError::new(
            DslErrorKind::ArityError,
            call.args[spec.params.len()].span,
            format!(
                "`{}` takes at most {} argument(s), {} positional given",
                spec.name,
                spec.params.len(),
                call.args.len()
            ),
        ));
    }
    for (slot, arg) in slots.iter_mut().zip(&call.args) {
        *slot = Some((arg, arg.span));
    }
    for (name, arg) in &call.kwargs {
        match spec.param_index(name) {
            None => {
                let names: Vec<&str> = spec.params.iter().map(|p| p.name).collect();
                errors.push(DslError::new(
                    DslErrorKind::ArityError,
                    arg.span,
                    format!(
                        "`{}` has no parameter `{name}`; parameters are: {}",
                        spec.name,
                        names.join(", ")
                    ),
                ));
            }
            Some(i) if slots[i].is_some() => errors.push(DslError::new(
                DslErrorKind::ArityError,
                arg.span,
                format!("argument `{name}` of `{}` given both positionally and by keyword", spec.name),
            )),
            Some(i) => slots[i] = Some((arg, arg.span)),
        }
    }
    let mut values = Vec::with_capacity(spec.params.len());
    for (p, slot) in spec.params.iter().zip(&slots) {
        match (slot, p.default) {
            (Some((arg, _)), _) => match resolve_value(spec, p, arg, defined) {
                Ok(b) => values.push(b),
                Err(e) => errors.push(e),
            },
            (None, Some(d)) => values.push(from_default(d)),
            (None, None) => errors.push(DslError::new(
                DslErrorKind::ArityError,
                call.span,
                format!("`{}` is missing required argument `{}`", spec.name, p.name),
            )),
        }
    }
    if errors.is_empty() {
        Ok(BoundCall { spec, values })
    } else {
        Err(errors)
    }
}

/// Statically validates a program. An empty result means every call
/// resolves and every variable is defined before use.
pub fn check(program: &Program, registry: &Registry) -> Vec<DslError> {
    let mut defined: BTreeSet<&str> = BTreeSet::new();
    let mut errors = Vec::new();
    for stmt in &program.statements {
        if let Err(mut es) = bind(&stmt.call, registry, &defined) {
            errors.append(&mut es);
        }
        defined.insert(stmt.name.as_str());
    }
    if !defined.contains(program.output.name.as_str()) {
        errors.push(DslError::new(
            DslErrorKind::UnknownVariable,
            program.output.span,
            format!("output(...) refers to undefined variable `{}`", program.output.name),
        ));
    }
    errors
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    fn errs(src: &str) -> Vec<DslError> {
        check(&parse(src).unwrap(), &Registry::default())
    }

    const PEDS: &str = "peds = get_objects_of_category(category=\"PEDESTRIAN\")\ncars = get_objects_of_category(\"REGULAR_VEHICLE\")\n";

    #[test]
    fn valid_program() {
        let src = alloc::format!("{PEDS}x = has_objects_in_relative_direction(peds, cars, direction=\"forward\", max_number=inf, within_distance=30)\noutput(x)");
        assert_eq!(errs(&src), []);
        let src = alloc::format!("{PEDS}x = has_objects_in_relative_direction(peds, cars, forward)\ny = followed_by(x, peds, 2, cross_track=true)\noutput(y)");
        assert_eq!(errs(&src), []);
    }

    #[test]
    fn typo_suggests_name() {
        let e = errs(&alloc::format!("{PEDS}x = facing_towards(peds, cars)\noutput(x)"));
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].kind, DslErrorKind::UnknownFunction);
        assert!(e[0].message.contains("facing_toward`?"), "{}", e[0].message);
        assert_eq!(e[0].span, Span::new(3, 5));
    }

    #[test]
    fn bad_enum_lists_allowed() {
        let e = errs(&alloc::format!("{PEDS}x = has_objects_in_relative_direction(peds, cars, direction=\"forwards\")\noutput(x)"));
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].kind, DslErrorKind::InvalidEnumValue);
        assert!(e[0].message.contains("forward, backward, left, right"));
        let e = errs(&alloc::format!("{PEDS}x = heading_in_relative_direction_to(peds, cars, \"parallel\")\noutput(x)"));
        assert!(e[0].message.contains("same, opposite, perpendicular"));
    }

    #[test]
    fn arity_and_types() {
        let e = errs(&alloc::format!("{PEDS}x = near_objects(peds)\noutput(x)"));
        assert_eq!(e[0].kind, DslErrorKind::ArityError);
        assert!(e[0].message.contains("related_candidates"));
        let e = errs(&alloc::format!("{PEDS}x = near_objects(peds, cars, 1, 2, 3)\noutput(x)"));
        assert_eq!(e[0].kind, DslErrorKind::ArityError);
        let e = errs(&alloc::format!("{PEDS}x = near_objects(peds, cars, radius=3)\noutput(x)"));
        assert!(e[0].message.contains("no parameter `radius`"));
        let e = errs(&alloc::format!("{PEDS}x = near_objects(peds, cars, track_candidates=cars)\noutput(x)"));
        assert!(e[0].message.contains("both positionally and by keyword"));
        let e = errs(&alloc::format!("{PEDS}x = near_objects(peds, cars, distance_thresh=\"ten\")\noutput(x)"));
        assert_eq!(e[0].kind, DslErrorKind::TypeError);
        let e = errs(&alloc::format!("{PEDS}x = near_objects(peds, cars, min_objects=1.5)\noutput(x)"));
        assert_eq!(e[0].kind, DslErrorKind::TypeError);
        let e = errs(&alloc::format!("{PEDS}x = near_objects(peds, \"cars\")\noutput(x)"));
        assert_eq!(e[0].kind, DslErrorKind::TypeError);
        let e = errs("x = get_objects_of_category(category=TRUCK)\noutput(x)");
        assert_eq!(e[0].kind, DslErrorKind::TypeError);
    }

    #[test]
    fn dataflow() {
        let e = errs(&alloc::format!("{PEDS}x = near_objects(peds, bikes)\noutput(x)"));
        assert_eq!(e[0].kind, DslErrorKind::UnknownVariable);
        let e = errs("x = near_objects(x, x)\noutput(x)");
        assert_eq!(e.len(), 2);
        let e = errs(&alloc::format!("{PEDS}output(nothing)"));
        assert_eq!(e[0].kind, DslErrorKind::UnknownVariable);
        // errors in several statements are all reported
        let e = errs("a = nope()\nb = near_objects(a, a, min_objects=\"x\")\noutput(b)");
        assert_eq!(e.len(), 2);
    }
}
