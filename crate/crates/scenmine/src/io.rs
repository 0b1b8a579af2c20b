//! JSON file formats: logs, ground truth, predictions and manifests.
//!
//! Log file:
//!
//! ```json
//! {"log_id": "...", "timestamps": [0, 100000000],
//!  "objects": [{"track_id": "...", "category": "PEDESTRIAN",
//!               "states": {"0": {"position": [x, y, z], "heading": h,
//!                                "velocity": [vx, vy, vz], "box_dims": [l, w, h]}}}]}
//! ```
//!
//! Ground-truth file: `{"query_text", "log_id", "relevant": {"<track_id>": [timestamps]}}`.
//! Floats are written in shortest round-trip form, so save then load is exact.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use scenmine_core::tracklog::{Invariant, TrackLogError};
use scenmine_core::{CategoryRegistry, GroundTruthScenario, ObjectState, ScenarioSet, TrackLog, TrackedObject};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: malformed file at line {line}, column {column}: {message}", path.display())]
    MalformedFile {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}: {source}", path.display())]
    InvariantViolation {
        path: PathBuf,
        #[source]
        source: TrackLogError,
    },
}

impl FileError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        FileError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// The violated log invariant, if that is what went wrong.
    pub fn invariant(&self) -> Option<Invariant> {
        match self {
            FileError::InvariantViolation { source, .. } => source.invariant(),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LogFile {
    log_id: String,
    timestamps: Vec<i64>,
    objects: Vec<ObjectFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectFile {
    track_id: String,
    category: String,
    states: BTreeMap<i64, StateFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    position: [f64; 3],
    heading: f64,
    velocity: [f64; 3],
    box_dims: [f64; 3],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroundTruthFile {
    query_text: String,
    log_id: String,
    relevant: ScenarioSet,
}

/// `{"query_text": {"log_id": {"track_id": [timestamps]}}}`.
pub type Predictions = BTreeMap<String, BTreeMap<String, ScenarioSet>>;

fn read(path: &Path) -> Result<String, FileError> {
    fs::read_to_string(path).map_err(|e| FileError::io(path, e))
}

/// Parses JSON, reporting the position of the first schema error.
pub fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, FileError> {
    serde_json::from_str(text).map_err(|e| FileError::MalformedFile {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, FileError> {
    parse_json(path, &read(path)?)
}

/// Writes through a temporary file in the same directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), FileError> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(|e| FileError::io(path, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        FileError::io(path, e)
    })
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), FileError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn log_from_json(path: &Path, text: &str, categories: &CategoryRegistry) -> Result<TrackLog, FileError> {
    let file: LogFile = parse_json(path, text)?;
    let violation = |source| FileError::InvariantViolation {
        path: path.to_path_buf(),
        source,
    };
    let mut objects = Vec::with_capacity(file.objects.len());
    for obj in file.objects {
        let category = categories.resolve(&obj.category).map_err(|_| {
            violation(TrackLogError::violation(
                Invariant::KnownCategory,
                format!("track `{}` has unknown category `{}`", obj.track_id, obj.category),
            ))
        })?;
        let states = obj
            .states
            .into_iter()
            .map(|(t, s)| {
                (
                    t,
                    ObjectState {
                        position: s.position,
                        heading: s.heading,
                        velocity: s.velocity,
                        box_dims: s.box_dims,
                    },
                )
            })
            .collect();
        objects.push(TrackedObject {
            track_id: obj.track_id,
            category,
            states,
        });
    }
    TrackLog::new(file.log_id, file.timestamps, objects).map_err(violation)
}

pub fn log_to_json(log: &TrackLog) -> String {
    let file = LogFile {
        log_id: log.log_id().to_string(),
        timestamps: log.timestamps().to_vec(),
        objects: log
            .objects()
            .iter()
            .map(|o| ObjectFile {
                track_id: o.track_id.clone(),
                category: o.category.as_str().to_string(),
                states: o
                    .states
                    .iter()
                    .map(|(t, s)| {
                        (
                            *t,
                            StateFile {
                                position: s.position,
                                heading: s.heading,
                                velocity: s.velocity,
                                box_dims: s.box_dims,
                            },
                        )
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string(&file).expect("finite values serialize");
    text.push('\n');
    text
}

pub fn load_log(path: &Path, categories: &CategoryRegistry) -> Result<TrackLog, FileError> {
    log_from_json(path, &read(path)?, categories)
}

pub fn save_log(log: &TrackLog, path: &Path) -> Result<(), FileError> {
    write_atomic(path, log_to_json(log).as_bytes())
}

pub fn load_ground_truth(path: &Path) -> Result<GroundTruthScenario, FileError> {
    let file: GroundTruthFile = read_json(path)?;
    Ok(GroundTruthScenario {
        query_text: file.query_text,
        log_id: file.log_id,
        relevant: file.relevant,
    })
}

pub fn save_ground_truth(gt: &GroundTruthScenario, path: &Path) -> Result<(), FileError> {
    write_json(
        path,
        &GroundTruthFile {
            query_text: gt.query_text.clone(),
            log_id: gt.log_id.clone(),
            relevant: gt.relevant.clone(),
        },
    )
}

/// `*.json` files directly inside `dir`, sorted by name.
pub fn json_files(dir: &Path) -> Result<Vec<PathBuf>, FileError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| FileError::io(dir, e))? {
        let path = entry.map_err(|e| FileError::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Every log in `dir`, keyed by log id. Two files with the same id are an
/// error.
pub fn load_log_dir(dir: &Path, categories: &CategoryRegistry) -> Result<BTreeMap<String, TrackLog>, FileError> {
    let mut logs = BTreeMap::new();
    for path in json_files(dir)? {
        let log = load_log(&path, categories)?;
        if logs.contains_key(log.log_id()) {
            return Err(FileError::InvariantViolation {
                path,
                source: TrackLogError::violation(Invariant::UniqueTrackIds, format!("log id `{}` appears twice", log.log_id())),
            });
        }
        logs.insert(log.log_id().to_string(), log);
    }
    Ok(logs)
}

pub fn load_ground_truth_dir(dir: &Path) -> Result<Vec<GroundTruthScenario>, FileError> {
    json_files(dir)?.iter().map(|p| load_ground_truth(p)).collect()
}

/// A file name derived from an arbitrary id.
pub fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect()
}
