//! Object category registry.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Names every registry must contain.
pub const REQUIRED_CATEGORIES: [&str; 7] = [
    "REGULAR_VEHICLE",
    "PEDESTRIAN",
    "TRUCK",
    "BUS",
    "BICYCLIST",
    "MOTORCYCLIST",
    "EGO_VEHICLE",
];

/// Upper bound on registry size.
pub const MAX_CATEGORIES: usize = 26;

/// A category name that has been resolved against a [`CategoryRegistry`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct ObjectCategory(String);

impl ObjectCategory {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ObjectCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CategoryError {
    #[error("unknown object category `{name}`")]
    Unknown { name: String },
    #[error("category registry is missing required category `{0}`")]
    MissingRequired(&'static str),
    #[error("category registry lists `{0}` more than once")]
    Duplicate(String),
    #[error("category registry has {0} entries, at most {MAX_CATEGORIES} are allowed")]
    TooMany(usize),
}

/// The set of legal category names. Comparison is exact and case-sensitive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CategoryRegistry {
    names: Vec<String>,
}

impl Default for CategoryRegistry {
    fn default() -> Self {
        Self {
            names: REQUIRED_CATEGORIES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl CategoryRegistry {
    /// Builds a registry from configured names. The required names must all be
    /// present; order is preserved.
    pub fn new<I, S>(names: I) -> Result<Self, CategoryError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for name in names {
            let name = name.into();
            if out.contains(&name) {
                return Err(CategoryError::Duplicate(name));
            }
            out.push(name);
        }
        if out.len() > MAX_CATEGORIES {
            return Err(CategoryError::TooMany(out.len()));
        }
        for req in REQUIRED_CATEGORIES {
            if !out.iter().any(|n| n == req) {
                return Err(CategoryError::MissingRequired(req));
            }
        }
        Ok(Self { names: out })
    }

    pub fn resolve(&self, name: &str) -> Result<ObjectCategory, CategoryError> {
        if self.contains(name) {
            Ok(ObjectCategory(name.to_string()))
        } else {
            Err(CategoryError::Unknown {
                name: name.to_string(),
            })
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}
