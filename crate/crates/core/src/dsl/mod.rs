//! The scenario query language.
//!
//! Programs are straight-line, single-assignment sequences of calls into the
//! function [`Registry`](crate::registry::Registry), ending in one
//! `output(name)` statement:
//!
//! ```text
//! peds = get_objects_of_category(category="PEDESTRIAN")
//! cars = get_objects_of_category(category="REGULAR_VEHICLE")
//! hit = has_objects_in_relative_direction(peds, cars, direction="forward")
//! output(hit)
//! ```
//!
//! There are no loops, nested calls or user functions, so a program can only
//! ever run registry functions.

mod ast;
mod check;
mod describe;
mod error;
mod interp;
mod lexer;
mod parser;

pub use ast::{Arg, Assignment, Call, Output, Program, Value};
pub use check::check;
pub use describe::{describe_functions, CATALOG_FUNCTION_PREFIX};
pub use error::{DslError, DslErrorKind, Span};
pub use interp::interpret;
pub use parser::parse;

/// Parses, checks and runs `text`, returning the first error encountered.
pub fn run(
    text: &str,
    log: &crate::tracklog::TrackLog,
    registry: &crate::registry::Registry,
) -> Result<crate::scenario::ScenarioSet, DslError> {
    let program = parse(text)?;
    if let Some(first) = check(&program, registry).into_iter().next() {
        return Err(first);
    }
    interpret(&program, log, registry)
}
