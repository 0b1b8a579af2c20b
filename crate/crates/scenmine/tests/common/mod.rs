#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;

use scenmine::corpus;
use scenmine::io::FileError;
use scenmine::provider::{fence, Fixture, Reply};
use scenmine_core::synth::GeneratedScenario;
use scenmine_core::tracklog::Invariant;
use scenmine_core::{GroundTruthScenario, Registry, TrackLog};
use serde_json::{json, Value};

pub fn valid_log() -> Value {
    json!({
        "log_id": "tiny",
        "timestamps": [0, 100000000, 200000000],
        "objects": [
            {"track_id": "ped", "category": "PEDESTRIAN", "states": {
                "0": {"position": [0.0, 0.0, 0.0], "heading": 0.0, "velocity": [1.0, 0.0, 0.0], "box_dims": [0.6, 0.6, 1.7]},
                "100000000": {"position": [0.1, 0.0, 0.0], "heading": 0.0, "velocity": [1.0, 0.0, 0.0], "box_dims": [0.6, 0.6, 1.7]}
            }},
            {"track_id": "car", "category": "REGULAR_VEHICLE", "states": {
                "0": {"position": [10.0, 0.0, 0.0], "heading": 3.0, "velocity": [0.0, 0.0, 0.0], "box_dims": [4.5, 1.9, 1.5]}
            }}
        ]
    })
}

/// What a malformed file must be rejected with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expected {
    Malformed { line: usize },
    MissingField(&'static str),
    Violation(Invariant),
}

impl Expected {
    pub fn matches(&self, err: &FileError) -> bool {
        match (self, err) {
            (Expected::Malformed { line: want }, FileError::MalformedFile { line, column, .. }) => line == want && *column > 0,
            (Expected::MissingField(f), FileError::MalformedFile { message, .. }) => {
                message.contains(&format!("missing field `{f}`"))
            }
            (Expected::Violation(inv), e) => e.invariant() == Some(*inv),
            _ => false,
        }
    }
}

/// One broken log text per violation class.
pub fn malformed_cases() -> Vec<(&'static str, String, Expected)> {
    let edit = |f: &dyn Fn(&mut Value)| {
        let mut v = valid_log();
        f(&mut v);
        serde_json::to_string_pretty(&v).unwrap()
    };
    let pretty = serde_json::to_string_pretty(&valid_log()).unwrap();
    let bad_line = pretty.lines().position(|l| l.contains("\"heading\"")).unwrap() + 1;
    let garbled = pretty.replacen("\"heading\": 0.0", "\"heading\": zero", 1);
    vec![
        ("json syntax", garbled, Expected::Malformed { line: bad_line }),
        (
            "missing field",
            edit(&|v| {
                v.as_object_mut().unwrap().remove("timestamps");
            }),
            Expected::MissingField("timestamps"),
        ),
        (
            "timestamps not increasing",
            edit(&|v| v["timestamps"] = json!([0, 100000000, 100000000])),
            Expected::Violation(Invariant::TimestampsIncreasing),
        ),
        (
            "fewer than two timestamps",
            edit(&|v| {
                v["timestamps"] = json!([0]);
                v["objects"][0]["states"].as_object_mut().unwrap().remove("100000000");
            }),
            Expected::Violation(Invariant::MinTimestamps),
        ),
        (
            "duplicate track id",
            edit(&|v| v["objects"][1]["track_id"] = json!("ped")),
            Expected::Violation(Invariant::UniqueTrackIds),
        ),
        (
            "state timestamp not in log",
            edit(&|v| {
                let s = v["objects"][1]["states"]["0"].clone();
                v["objects"][1]["states"]["50000000"] = s;
            }),
            Expected::Violation(Invariant::StateTimestampInLog),
        ),
        (
            "unknown category",
            edit(&|v| v["objects"][1]["category"] = json!("SPACESHIP")),
            Expected::Violation(Invariant::KnownCategory),
        ),
    ]
}

pub struct Corpus {
    pub scenarios: Vec<GeneratedScenario>,
    pub logs: BTreeMap<String, TrackLog>,
    pub gts: Vec<GroundTruthScenario>,
}

impl Corpus {
    pub fn new(count: usize, seed: u64) -> Self {
        let requests = corpus::default_requests(count, seed, true);
        let scenarios = corpus::generate(&requests, &Registry::default()).unwrap();
        let logs = scenarios.iter().map(|g| (g.log.log_id().to_string(), g.log.clone())).collect();
        let gts = scenarios.iter().map(|g| g.ground_truth.clone()).collect();
        Self { scenarios, logs, gts }
    }

    /// Each query with its canonical and role-swapped program, in order.
    pub fn queries(&self) -> Vec<(String, String, String)> {
        let mut out: Vec<(String, String, String)> = Vec::new();
        for g in &self.scenarios {
            let m = &g.manifest;
            if !out.iter().any(|(q, _, _)| *q == m.query_text) {
                out.push((m.query_text.clone(), m.program.clone(), m.role_swapped_program.clone()));
            }
        }
        out
    }
}

/// A program that fails to parse or names a misspelled function.
pub fn broken(program: &str, variant: usize) -> String {
    if variant.is_multiple_of(2) {
        program.replacen("get_objects_of_category(", "get_object_of_category(", 1)
    } else {
        let mut lines: Vec<String> = program.lines().map(String::from).collect();
        let i = lines.iter().position(|l| l.trim_end().ends_with(')') && !l.starts_with('#')).unwrap();
        lines[i] = lines[i].trim_end().trim_end_matches(')').to_string();
        lines.join("\n")
    }
}

/// Which fault, if any, query `i` carries in the ablation fixtures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    Swap,
    Syntax,
    None,
}

pub fn fault(i: usize) -> Fault {
    match i % 3 {
        0 => Fault::Swap,
        1 => Fault::Syntax,
        _ => Fault::None,
    }
}

/// Baseline replies: swaps answer with the role-swapped program, syntax
/// faults answer with a broken program first and the canonical one on
/// the next attempt.
pub fn baseline_fixture(c: &Corpus) -> Fixture {
    let mut f = Fixture::default();
    for (i, (q, program, swapped)) in c.queries().iter().enumerate() {
        let replies = match fault(i) {
            Fault::Swap => vec![fence(swapped)],
            Fault::Syntax => vec![fence(&broken(program, i / 3)), fence(program)],
            Fault::None => vec![fence(program)],
        };
        f.insert(q, replies.into_iter().map(Reply::Text).collect());
    }
    f
}

/// As the baseline, with argument order corrected.
pub fn corrected_fixture(c: &Corpus) -> Fixture {
    let mut f = Fixture::default();
    for (i, (q, program, _)) in c.queries().iter().enumerate() {
        let replies = match fault(i) {
            Fault::Syntax => vec![fence(&broken(program, i / 3)), fence(program)],
            _ => vec![fence(program)],
        };
        f.insert(q, replies.into_iter().map(Reply::Text).collect());
    }
    f
}

pub fn oracle_fixture(c: &Corpus) -> Fixture {
    let mut f = Fixture::default();
    for (q, program, _) in c.queries() {
        f.insert_programs(&q, &[program]);
    }
    f
}

/// Every regular file under `dir` with its bytes, keyed by relative path.
pub fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}
