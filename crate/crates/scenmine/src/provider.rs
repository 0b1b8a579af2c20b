//! Language-model providers: a fixture-driven stub and an HTTP client.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use scenmine_core::ftcg::{GenerationRequest, LlmProvider, ProviderError};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::io::{self, FileError};

/// Environment variable holding the bearer token for the HTTP provider.
pub const API_KEY_ENV: &str = "SCENMINE_API_KEY";

/// Hex SHA-256 of the query text; the fixture key.
pub fn query_hash(query: &str) -> String {
    Sha256::digest(query.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// One scripted reply.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Reply {
    Text(String),
    /// Simulates a transport failure on that attempt.
    TransportError { transport_error: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureEntry {
    /// For humans reading the file; matching uses the hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query_text: Option<String>,
    /// Reply for attempt 1, 2, ...; the last one repeats.
    pub responses: Vec<Reply>,
}

/// Replies keyed by query hash and attempt number.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub entries: BTreeMap<String, FixtureEntry>,
}

impl Fixture {
    pub fn insert(&mut self, query: &str, responses: Vec<Reply>) {
        self.entries.insert(
            query_hash(query),
            FixtureEntry {
                query_text: Some(query.to_string()),
                responses,
            },
        );
    }

    /// Convenience for the common case of plain programs, each wrapped in a
    /// fenced block.
    pub fn insert_programs<S: AsRef<str>>(&mut self, query: &str, programs: &[S]) {
        self.insert(query, programs.iter().map(|p| Reply::Text(fence(p.as_ref()))).collect());
    }

    pub fn load(path: &Path) -> Result<Self, FileError> {
        io::read_json(path)
    }

    pub fn save(&self, path: &Path) -> Result<(), FileError> {
        io::write_json(path, self)
    }
}

/// A program as a model would return it.
pub fn fence(program: &str) -> String {
    let mut body = program.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    format!("```python\n{body}```\n")
}

#[derive(Clone, Debug)]
pub struct ScriptedProvider {
    fixture: Fixture,
}

impl ScriptedProvider {
    pub fn new(fixture: Fixture) -> Self {
        Self { fixture }
    }
}

impl LlmProvider for ScriptedProvider {
    fn generate(&self, request: &GenerationRequest<'_>) -> Result<String, ProviderError> {
        let key = query_hash(request.query);
        let entry = self
            .fixture
            .entries
            .get(&key)
            .filter(|e| !e.responses.is_empty())
            .ok_or_else(|| ProviderError::new(format!("fixture has no replies for query hash {key}")))?;
        let i = request.iteration.saturating_sub(1).min(entry.responses.len() - 1);
        match &entry.responses[i] {
            Reply::Text(t) => Ok(t.clone()),
            Reply::TransportError { transport_error } => Err(ProviderError::new(transport_error.clone())),
        }
    }
}

/// POSTs `{"model", "prompt"}` as JSON with a bearer token. The reply is
/// the `response`, `text` or `output` string field of a JSON object, or the
/// raw body when it is not JSON.
pub struct HttpProvider {
    agent: ureq::Agent,
    endpoint: String,
    model: String,
    api_key: Option<String>,
}

impl HttpProvider {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>, api_key: Option<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(true)
            .build()
            .new_agent();
        Self {
            agent,
            endpoint: endpoint.into(),
            model: model.into(),
            api_key,
        }
    }
}

#[derive(Serialize)]
struct HttpRequest<'a> {
    model: &'a str,
    prompt: &'a str,
}

fn reply_text(body: String) -> String {
    if let Ok(serde_json::Value::Object(map)) = serde_json::from_str::<serde_json::Value>(&body) {
        for key in ["response", "text", "output"] {
            if let Some(serde_json::Value::String(s)) = map.get(key) {
                return s.clone();
            }
        }
    }
    body
}

impl LlmProvider for HttpProvider {
    fn generate(&self, request: &GenerationRequest<'_>) -> Result<String, ProviderError> {
        let mut call = self.agent.post(&self.endpoint);
        if let Some(key) = &self.api_key {
            call = call.header("Authorization", format!("Bearer {key}"));
        }
        let mut response = call
            .send_json(HttpRequest {
                model: &self.model,
                prompt: &request.prompt.text,
            })
            .map_err(|e| ProviderError::new(e.to_string()))?;
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| ProviderError::new(e.to_string()))?;
        Ok(reply_text(body))
    }

    fn backoff(&self, delay: Duration) {
        std::thread::sleep(delay);
    }
}
