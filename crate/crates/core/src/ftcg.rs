//! Fault-tolerant iterative program generation.
//!
//! The loop asks a language model for a program, runs it, and on any error
//! re-prompts with the failing program and its error message, for at most
//! `max_iterations` attempts. Transport failures get one retry with
//! backoff before they count as a failed attempt.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::time::Duration;

use crate::dsl::{self, DslError};
use crate::promptgen::{Prompt, PromptComposer, PromptError};
use crate::registry::Registry;
use crate::scenario::ScenarioSet;
use crate::tracklog::TrackLog;

/// What a provider is asked for on one attempt.
#[derive(Clone, Copy, Debug)]
pub struct GenerationRequest<'a> {
    pub prompt: &'a Prompt,
    pub query: &'a str,
    /// 1-based attempt number.
    pub iteration: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("provider error: {message}")]
pub struct ProviderError {
    pub message: String,
}

impl ProviderError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }
}

/// A text-in, text-out language model.
pub trait LlmProvider: Send + Sync {
    fn generate(&self, request: &GenerationRequest<'_>) -> Result<String, ProviderError>;

    /// Waits before a transport retry. Providers without real I/O keep the
    /// default no-op.
    fn backoff(&self, _delay: Duration) {}
}

impl<P: LlmProvider + ?Sized> LlmProvider for &P {
    fn generate(&self, request: &GenerationRequest<'_>) -> Result<String, ProviderError> {
        (**self).generate(request)
    }

    fn backoff(&self, delay: Duration) {
        (**self).backoff(delay)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MiningConfig {
    /// Attempt budget; at least 1.
    pub max_iterations: usize,
    pub epsrf_enabled: bool,
    /// Transport retries per attempt.
    pub transport_retries: u32,
    /// First retry delay; later retries double it.
    pub retry_backoff: Duration,
}

/// Attempt budget used unless configured otherwise.
pub const DEFAULT_MAX_ITERATIONS: usize = 5;

impl Default for MiningConfig {
    fn default() -> Self {
        Self {
            max_iterations: DEFAULT_MAX_ITERATIONS,
            epsrf_enabled: true,
            transport_retries: 1,
            retry_backoff: Duration::from_secs(2),
        }
    }
}

/// Why one attempt failed.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "snake_case"))]
pub enum AttemptError {
    Program(DslError),
    EmptyResponse,
    Provider { message: String },
}

impl fmt::Display for AttemptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttemptError::Program(e) => write!(f, "{e}"),
            AttemptError::EmptyResponse => f.write_str("EmptyResponse: the reply contained no program"),
            AttemptError::Provider { message } => write!(f, "ProviderError: {message}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationRecord {
    /// 1-based.
    pub index: usize,
    pub prompt: Prompt,
    pub response: Option<String>,
    pub extracted_code: Option<String>,
    pub error: Option<AttemptError>,
    /// Provider calls made for this attempt, retries included.
    pub provider_calls: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "status", rename_all = "snake_case"))]
pub enum MiningStatus {
    Success { result: ScenarioSet },
    Failed { attempts: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MiningOutcome {
    pub query_text: String,
    pub log_id: String,
    pub iterations: Vec<IterationRecord>,
    pub status: MiningStatus,
}

impl MiningOutcome {
    /// The mined set; failed runs predict nothing.
    pub fn prediction(&self) -> ScenarioSet {
        match &self.status {
            MiningStatus::Success { result } => result.clone(),
            MiningStatus::Failed { .. } => ScenarioSet::new(),
        }
    }

    pub fn is_success(&self) -> bool {
        matches!(self.status, MiningStatus::Success { .. })
    }

    pub fn provider_calls(&self) -> u32 {
        self.iterations.iter().map(|r| r.provider_calls).sum()
    }

    /// The program that succeeded, if any.
    pub fn valid_code(&self) -> Option<&str> {
        if self.is_success() {
            self.iterations.last().and_then(|r| r.extracted_code.as_deref())
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FtcgError {
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("max_iterations must be at least 1")]
    ZeroIterations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("response is empty")]
pub struct EmptyResponse;

/// Body of the first fenced code block, or the whole trimmed response when
/// there is no fence. An opening fence without a closing one runs to the
/// end of the response.
pub fn extract_code(response: &str) -> Result<String, EmptyResponse> {
    let body = match response.find("```") {
        Some(start) => {
            let after = &response[start + 3..];
            // skip an info string such as ```python
            let after = match after.find('\n') {
                Some(nl) if !after[..nl].contains("```") => &after[nl + 1..],
                _ => after,
            };
            match after.find("```") {
                Some(end) => &after[..end],
                None => after,
            }
        }
        None => response,
    };
    let body = body.trim();
    if body.is_empty() {
        Err(EmptyResponse)
    } else {
        Ok(body.to_string())
    }
}

fn call_with_retry<P: LlmProvider + ?Sized>(
    provider: &P,
    request: &GenerationRequest<'_>,
    cfg: &MiningConfig,
) -> (Result<String, ProviderError>, u32) {
    let mut calls = 0;
    let mut delay = cfg.retry_backoff;
    loop {
        calls += 1;
        match provider.generate(request) {
            Ok(text) => return (Ok(text), calls),
            Err(e) if calls > cfg.transport_retries => return (Err(e), calls),
            Err(_) => {
                provider.backoff(delay);
                delay = delay.saturating_mul(2);
            }
        }
    }
}

/// Runs the generate-execute-repair loop for one query on one log.
pub fn ftcg_generate<P: LlmProvider + ?Sized>(
    nl_query: &str,
    log: &TrackLog,
    registry: &Registry,
    provider: &P,
    cfg: &MiningConfig,
) -> Result<MiningOutcome, FtcgError> {
    if cfg.max_iterations == 0 {
        return Err(FtcgError::ZeroIterations);
    }
    let composer = PromptComposer::new(dsl::describe_functions(registry), cfg.epsrf_enabled);
    let mut prompt = composer.initial(nl_query)?;
    let mut iterations = Vec::new();
    for index in 1..=cfg.max_iterations {
        let request = GenerationRequest {
            prompt: &prompt,
            query: nl_query,
            iteration: index,
        };
        let (reply, provider_calls) = call_with_retry(provider, &request, cfg);
        let mut record = IterationRecord {
            index,
            prompt: prompt.clone(),
            response: None,
            extracted_code: None,
            error: None,
            provider_calls,
        };
        let attempt = reply
            .map_err(|e| AttemptError::Provider { message: e.message })
            .and_then(|text| {
                record.response = Some(text.clone());
                extract_code(&text).map_err(|_| AttemptError::EmptyResponse)
            })
            .and_then(|code| {
                record.extracted_code = Some(code.clone());
                dsl::run(&code, log, registry).map_err(AttemptError::Program)
            });
        match attempt {
            Ok(result) => {
                iterations.push(record);
                return Ok(MiningOutcome {
                    query_text: nl_query.into(),
                    log_id: log.log_id().into(),
                    iterations,
                    status: MiningStatus::Success { result },
                });
            }
            Err(err) => {
                let prev_code = match (&record.extracted_code, &record.response) {
                    (Some(code), _) => code.clone(),
                    (None, Some(raw)) if !raw.trim().is_empty() => raw.clone(),
                    (None, Some(_)) => String::from("(empty response)"),
                    (None, None) => String::from("(no response received)"),
                };
                prompt = composer.iteration(nl_query, &prev_code, &format!("{err}"))?;
                record.error = Some(err);
                iterations.push(record);
            }
        }
    }
    Ok(MiningOutcome {
        query_text: nl_query.into(),
        log_id: log.log_id().into(),
        iterations,
        status: MiningStatus::Failed {
            attempts: cfg.max_iterations,
        },
    })
}
