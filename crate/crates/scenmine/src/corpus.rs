//! Writing synthetic corpora to disk.
//!
//! Layout under the output directory:
//!
//! ```text
//! logs/<log_id>.json        track logs
//! gt/<log_id>.json          ground truth for the log's query
//! manifests/<log_id>.json   generation record with certification hashes
//! queries.json              [{"query_text", "log_ids"}] in spec order
//! fixtures/oracle.json      stub replies with each query's certified program
//! fixtures/role_swapped.json  the same with candidate roles exchanged
//! ```

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use scenmine_core::synth::{self, GeneratedScenario, ScenarioSpec, SynthError};
use scenmine_core::Registry;
use serde::{Deserialize, Serialize};

use crate::batch::QuerySpec;
use crate::io::{self, FileError};
use crate::provider::Fixture;

/// One entry of a synth spec file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthRequest {
    #[serde(flatten)]
    pub spec: ScenarioSpec,
    /// Layout seeds of negative logs to generate alongside.
    #[serde(default)]
    pub negative_seeds: Vec<u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("spec #{index} ({template}, seed {seed}): {source}")]
    Spec {
        index: usize,
        template: String,
        seed: u64,
        #[source]
        source: SynthError,
    },
    #[error("log id `{0}` is generated twice")]
    DuplicateLog(String),
    #[error(transparent)]
    File(#[from] FileError),
}

/// The default corpus: `count` distinct queries, each with one positive
/// and, optionally, one negative log.
pub fn default_requests(count: usize, seed: u64, negatives: bool) -> Vec<SynthRequest> {
    synth::corpus_specs(count, seed)
        .into_iter()
        .map(|spec| SynthRequest {
            negative_seeds: if negatives { vec![spec.seed.wrapping_add(1_000_003)] } else { Vec::new() },
            spec,
        })
        .collect()
}

pub fn load_requests(path: &Path) -> Result<Vec<SynthRequest>, FileError> {
    io::read_json(path)
}

/// Generates every log first, then writes; an infeasible spec leaves the
/// output directory untouched.
pub fn generate(requests: &[SynthRequest], registry: &Registry) -> Result<Vec<GeneratedScenario>, CorpusError> {
    let mut out = Vec::new();
    let mut ids = BTreeSet::new();
    for (index, req) in requests.iter().enumerate() {
        let wrap = |source| CorpusError::Spec {
            index,
            template: req.spec.template.to_string(),
            seed: req.spec.seed,
            source,
        };
        let mut batch = vec![synth::generate_scenario_log(&req.spec, registry).map_err(wrap)?];
        for &seed in &req.negative_seeds {
            batch.push(synth::generate_negative_log(&req.spec, seed, registry).map_err(wrap)?);
        }
        for g in batch {
            if !ids.insert(g.log.log_id().to_string()) {
                return Err(CorpusError::DuplicateLog(g.log.log_id().to_string()));
            }
            out.push(g);
        }
    }
    Ok(out)
}

fn dir(path: &Path) -> Result<(), FileError> {
    fs::create_dir_all(path).map_err(|e| FileError::io(path, e))
}

/// Writes a generated corpus.
pub fn write(corpus: &[GeneratedScenario], out: &Path) -> Result<(), FileError> {
    for sub in ["logs", "gt", "manifests", "fixtures"] {
        dir(&out.join(sub))?;
    }
    let mut queries: Vec<(String, Vec<String>)> = Vec::new();
    let mut oracle = Fixture::default();
    let mut swapped = Fixture::default();
    for g in corpus {
        let stem = io::file_stem(g.log.log_id());
        io::save_log(&g.log, &out.join("logs").join(format!("{stem}.json")))?;
        io::save_ground_truth(&g.ground_truth, &out.join("gt").join(format!("{stem}.json")))?;
        io::write_json(&out.join("manifests").join(format!("{stem}.json")), &g.manifest)?;
        let q = &g.manifest.query_text;
        match queries.iter_mut().find(|(text, _)| text == q) {
            Some((_, ids)) => ids.push(g.log.log_id().to_string()),
            None => queries.push((q.clone(), vec![g.log.log_id().to_string()])),
        }
        oracle.insert_programs(q, &[&g.manifest.program]);
        swapped.insert_programs(q, &[&g.manifest.role_swapped_program]);
    }
    let queries: Vec<QuerySpec> = queries
        .into_iter()
        .map(|(query_text, log_ids)| QuerySpec::On { query_text, log_ids })
        .collect();
    io::write_json(&out.join("queries.json"), &queries)?;
    oracle.save(&out.join("fixtures").join("oracle.json"))?;
    swapped.save(&out.join("fixtures").join("role_swapped.json"))?;
    Ok(())
}
