//! Scenario mining over tracked-object driving logs.
//!
//! This crate is `no_std` (with `alloc`) and holds everything that does not
//! touch the file system or network: the track data model, planar geometry
//! kernels, the atomic scenario predicates, the query DSL (parser, checker,
//! interpreter), prompt composition, the fault-tolerant generation loop, the
//! tracking metrics and the synthetic log generator.
//!
//! File formats, LLM transports and the command line live in the `scenmine`
//! crate.

#![no_std]

extern crate alloc;

pub mod category;
pub mod dsl;
pub mod ftcg;
pub mod geometry;
mod math;
pub mod metrics;
pub mod predicates;
pub mod promptgen;
pub mod registry;
pub mod scenario;
pub mod synth;
pub mod tracklog;

pub use category::{CategoryRegistry, ObjectCategory};
pub use geometry::{Direction, RelativeOffset};
pub use registry::Registry;
pub use scenario::ScenarioSet;
pub use tracklog::{GroundTruthScenario, ObjectState, Timestamp, TrackLog, TrackedObject};

/// Nanoseconds per second; timestamps are integer nanoseconds.
pub const NANOS_PER_SECOND: i64 = 1_000_000_000;
