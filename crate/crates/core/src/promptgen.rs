//! Prompt composition for program generation.
//!
//! A prompt is an ordered list of labelled parts whose concatenation is the
//! full text sent to the model. The first attempt carries the task header,
//! the function catalog, the optional role-guidance paragraph and the query.
//! Later attempts append feedback quoting the previous program and its
//! error.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PromptPart {
    TaskHeader,
    FunctionCatalog,
    EpsrfGuidance,
    Query,
    IterationFeedback,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Prompt {
    pub text: String,
    pub parts: Vec<(PromptPart, String)>,
}

impl Prompt {
    fn from_parts(parts: Vec<(PromptPart, String)>) -> Self {
        let text = parts.iter().map(|(_, t)| t.as_str()).collect();
        Self { text, parts }
    }

    pub fn part(&self, label: PromptPart) -> Option<&str> {
        self.parts
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, t)| t.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("query text is empty")]
    EmptyQuery,
    #[error("iteration feedback needs both the previous code and its error message")]
    EmptyFeedback,
}

const QUERY_LEAD: &str = "Scenario description: ";

const TASK_HEADER: &str = "\
You write scenario-mining programs for autonomous-driving logs. Translate the scenario description at the end of this prompt into a program in the scenario language below.

Language rules:
- One statement per line: `name = function(arguments)`.
- Arguments are strings in double quotes, numbers, or names of variables assigned on an earlier line. Calls cannot be nested.
- Each variable is assigned once. The last line is `output(name)` naming the variable that holds the answer.
- Lines starting with # are comments.

Example:
```
peds = get_objects_of_category(category=\"PEDESTRIAN\")
cars = get_objects_of_category(category=\"REGULAR_VEHICLE\")
car_ahead = has_objects_in_relative_direction(track_candidates=peds, related_candidates=cars, direction=\"forward\")
output(car_ahead)
```

Reply with exactly one fenced code block containing the program and nothing else.

";

/// Role-guidance paragraph for the relational functions.
pub fn epsrf_fragment() -> &'static str {
    "If you use has_objects_in_relative_direction(), being_crossed_by(), heading_in_relative_direction_to() functions, direction parameter specifies the orientation of related candidates relative to track candidates. The facing_toward() and heading_toward() functions indicate that the track candidates parameter is oriented toward the related candidates parameter."
}

/// The feedback sentence quoting the previous attempt.
pub fn iteration_sentence(prev_code: &str, error_msg: &str) -> String {
    format!(
        "This is the code generated last time: {prev_code}, with the error message: {error_msg}. Please avoid code runtime errors."
    )
}

/// Composes prompts for one query sequence with fixed catalog and guidance
/// settings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PromptComposer {
    catalog: String,
    epsrf: bool,
}

impl PromptComposer {
    pub fn new(catalog: impl Into<String>, epsrf: bool) -> Self {
        Self {
            catalog: catalog.into(),
            epsrf,
        }
    }

    pub fn epsrf(&self) -> bool {
        self.epsrf
    }

    fn base(&self, nl_query: &str) -> Result<Vec<(PromptPart, String)>, PromptError> {
        if nl_query.trim().is_empty() {
            return Err(PromptError::EmptyQuery);
        }
        let mut parts = Vec::with_capacity(5);
        parts.push((PromptPart::TaskHeader, String::from(TASK_HEADER)));
        let mut catalog = self.catalog.clone();
        if !catalog.ends_with('\n') {
            catalog.push('\n');
        }
        catalog.push('\n');
        parts.push((PromptPart::FunctionCatalog, catalog));
        if self.epsrf {
            parts.push((PromptPart::EpsrfGuidance, format!("{}\n\n", epsrf_fragment())));
        }
        parts.push((PromptPart::Query, format!("{QUERY_LEAD}{nl_query}\n")));
        Ok(parts)
    }

    pub fn initial(&self, nl_query: &str) -> Result<Prompt, PromptError> {
        self.base(nl_query).map(Prompt::from_parts)
    }

    pub fn iteration(
        &self,
        nl_query: &str,
        prev_code: &str,
        error_msg: &str,
    ) -> Result<Prompt, PromptError> {
        if prev_code.is_empty() || error_msg.is_empty() {
            return Err(PromptError::EmptyFeedback);
        }
        let mut parts = self.base(nl_query)?;
        parts.push((
            PromptPart::IterationFeedback,
            format!("\n{}\n", iteration_sentence(prev_code, error_msg)),
        ));
        Ok(Prompt::from_parts(parts))
    }
}

pub fn compose_initial(nl_query: &str, catalog: &str, epsrf: bool) -> Result<Prompt, PromptError> {
    PromptComposer::new(catalog, epsrf).initial(nl_query)
}

pub fn compose_iteration(
    nl_query: &str,
    catalog: &str,
    epsrf: bool,
    prev_code: &str,
    error_msg: &str,
) -> Result<Prompt, PromptError> {
    PromptComposer::new(catalog, epsrf).iteration(nl_query, prev_code, error_msg)
}

/// Recovers the scenario description from a composed prompt.
pub fn query_of(prompt: &Prompt) -> Option<&str> {
    prompt
        .part(PromptPart::Query)
        .and_then(|q| q.strip_prefix(QUERY_LEAD))
        .map(|q| q.strip_suffix('\n').unwrap_or(q))
}
