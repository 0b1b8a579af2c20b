use alloc::string::String;
use core::fmt;

/// 1-based source position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl Span {
    pub fn new(line: u32, column: u32) -> Self {
        Self { line, column }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DslErrorKind {
    ParseError,
    UnknownFunction,
    UnknownVariable,
    ArityError,
    TypeError,
    InvalidEnumValue,
    DuplicateOutput,
    MissingOutput,
    PredicateRuntime,
}

impl DslErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DslErrorKind::ParseError => "ParseError",
            DslErrorKind::UnknownFunction => "UnknownFunction",
            DslErrorKind::UnknownVariable => "UnknownVariable",
            DslErrorKind::ArityError => "ArityError",
            DslErrorKind::TypeError => "TypeError",
            DslErrorKind::InvalidEnumValue => "InvalidEnumValue",
            DslErrorKind::DuplicateOutput => "DuplicateOutput",
            DslErrorKind::MissingOutput => "MissingOutput",
            DslErrorKind::PredicateRuntime => "PredicateRuntime",
        }
    }
}

impl fmt::Display for DslErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A diagnostic about a program. Its `Display` form is what gets fed back
/// to the model on the next generation attempt.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[error("{kind} at {span}: {message}")]
pub struct DslError {
    pub kind: DslErrorKind,
    pub message: String,
    pub span: Span,
}

impl DslError {
    pub fn new(kind: DslErrorKind, span: Span, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
            span,
        }
    }
}
