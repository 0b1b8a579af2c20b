//! Batch mining: every (query, log) job through the generate-execute-repair
//! loop, with per-job transcripts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use scenmine_core::ftcg::{ftcg_generate, FtcgError, LlmProvider, MiningConfig, MiningOutcome};
use scenmine_core::{Registry, TrackLog};
use serde::{Deserialize, Serialize};

use crate::io::{self, FileError, Predictions};
use crate::provider::query_hash;

/// Entry of a queries file: a bare string runs on every log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuerySpec {
    Everywhere(String),
    On { query_text: String, log_ids: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Job {
    pub query_text: String,
    pub log_id: String,
}

#[derive(Debug, thiserror::Error)]
pub enum BatchError {
    #[error(transparent)]
    File(#[from] FileError),
    #[error("query `{query}` names log `{log_id}`, which is not loaded")]
    UnknownLog { query: String, log_id: String },
    #[error("query `{query}`: {source}")]
    Mining {
        query: String,
        #[source]
        source: FtcgError,
    },
}

/// Expands queries into jobs, in file order; bare queries take the logs in
/// id order.
pub fn expand_jobs(queries: &[QuerySpec], logs: &BTreeMap<String, TrackLog>) -> Result<Vec<Job>, BatchError> {
    let mut jobs = Vec::new();
    for q in queries {
        match q {
            QuerySpec::Everywhere(query) => jobs.extend(logs.keys().map(|id| Job {
                query_text: query.clone(),
                log_id: id.clone(),
            })),
            QuerySpec::On { query_text, log_ids } => {
                for id in log_ids {
                    if !logs.contains_key(id) {
                        return Err(BatchError::UnknownLog {
                            query: query_text.clone(),
                            log_id: id.clone(),
                        });
                    }
                    jobs.push(Job {
                        query_text: query_text.clone(),
                        log_id: id.clone(),
                    });
                }
            }
        }
    }
    Ok(jobs)
}

pub fn load_queries(path: &Path) -> Result<Vec<QuerySpec>, FileError> {
    io::read_json(path)
}

/// Transcript file name for one job.
pub fn transcript_name(job: &Job) -> String {
    format!("{}__{}.json", &query_hash(&job.query_text)[..16], io::file_stem(&job.log_id))
}

#[derive(Clone, Debug)]
pub struct BatchOptions {
    /// Concurrent jobs; at least one worker runs.
    pub workers: usize,
    /// Where transcripts go, if anywhere.
    pub transcripts: Option<PathBuf>,
}

impl Default for BatchOptions {
    fn default() -> Self {
        Self {
            workers: 1,
            transcripts: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BatchResult {
    /// In job order.
    pub outcomes: Vec<MiningOutcome>,
    pub predictions: Predictions,
}

impl BatchResult {
    pub fn failed(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.is_success()).count()
    }
}

/// Runs every job. Each job is taken by exactly one worker; results are
/// placed by job index, so the output does not depend on scheduling.
/// Failed jobs contribute an empty prediction.
pub fn run_batch<P: LlmProvider + ?Sized>(
    jobs: &[Job],
    logs: &BTreeMap<String, TrackLog>,
    registry: &Registry,
    provider: &P,
    cfg: &MiningConfig,
    options: &BatchOptions,
) -> Result<BatchResult, BatchError> {
    for job in jobs {
        if !logs.contains_key(&job.log_id) {
            return Err(BatchError::UnknownLog {
                query: job.query_text.clone(),
                log_id: job.log_id.clone(),
            });
        }
    }
    if let Some(dir) = &options.transcripts {
        std::fs::create_dir_all(dir).map_err(|e| FileError::io(dir, e))?;
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<MiningOutcome, BatchError>>>> =
        Mutex::new((0..jobs.len()).map(|_| None).collect());
    let worker = || loop {
        let i = next.fetch_add(1, Ordering::SeqCst);
        let Some(job) = jobs.get(i) else { break };
        let result = ftcg_generate(&job.query_text, &logs[&job.log_id], registry, provider, cfg)
            .map_err(|source| BatchError::Mining {
                query: job.query_text.clone(),
                source,
            })
            .and_then(|outcome| {
                if let Some(dir) = &options.transcripts {
                    io::write_json(&dir.join(transcript_name(job)), &outcome)?;
                }
                Ok(outcome)
            });
        slots.lock().expect("no worker panics while holding the lock")[i] = Some(result);
    };
    let workers = options.workers.clamp(1, jobs.len().max(1));
    std::thread::scope(|s| {
        for _ in 1..workers {
            s.spawn(worker);
        }
        worker();
    });

    let mut outcomes = Vec::with_capacity(jobs.len());
    let mut predictions = Predictions::new();
    for slot in slots.into_inner().expect("workers joined") {
        let outcome = slot.expect("every job ran")?;
        predictions
            .entry(outcome.query_text.clone())
            .or_default()
            .insert(outcome.log_id.clone(), outcome.prediction());
        outcomes.push(outcome);
    }
    Ok(BatchResult { outcomes, predictions })
}
